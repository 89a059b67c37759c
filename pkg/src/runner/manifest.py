"""Run context and manifest.

Every artifact a command writes is registered on the RunContext; the RunManifest
lists them with sha256 checksums and byte sizes. Its digest covers the config echo
and the checksums only, so re-running a config with the same seed reproduces it.
"""
from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunContext:
    """Mutable state of one command invocation."""

    name: str
    out_dir: Path
    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, int] = field(default_factory=dict)
    artifacts: List[Path] = field(default_factory=list)
    values: Dict[str, Any] = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, filename: str) -> Path:
        return self.out_dir / filename

    def add_artifact(self, path: Path) -> Path:
        path = Path(path)
        if path not in self.artifacts:
            self.artifacts.append(path)
        return path

    @property
    def wall_time_ms(self) -> int:
        return int((time.perf_counter() - self.started) * 1000)


@dataclass
class RunManifest:
    command: str
    name: str
    config: Dict[str, Any]
    artifacts: List[Dict[str, Any]]
    tool_version: str
    wall_time_ms: int
    timings: Dict[str, int]
    digest: str

    @classmethod
    def build(cls, ctx: RunContext) -> "RunManifest":
        entries = []
        for p in sorted(ctx.artifacts, key=lambda q: q.name):
            entries.append({"file": p.name, "sha256": sha256_file(p), "bytes": p.stat().st_size})
        payload = json.dumps({"config": ctx.config, "artifacts": entries, "version": __version__}, sort_keys=True, default=str)
        digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        return cls(ctx.command, ctx.name, ctx.config, entries, __version__, ctx.wall_time_ms, dict(ctx.timings), digest)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "name": self.name,
            "tool_version": self.tool_version,
            "digest": self.digest,
            "wall_time_ms": self.wall_time_ms,
            "timings": self.timings,
            "config": self.config,
            "artifacts": self.artifacts,
        }

    def write(self, out_dir: Path, filename: Optional[str] = None) -> Path:
        path = Path(out_dir) / (filename or MANIFEST_NAME)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str), encoding="utf-8")
        logger.info("manifest run=%s artifacts=%d digest=%s", self.name, len(self.artifacts), self.digest[:12])
        return path


def finish(ctx: RunContext) -> RunManifest:
    """Build and write the manifest of a finished command."""
    manifest = RunManifest.build(ctx)
    manifest.write(ctx.out_dir)
    return manifest
