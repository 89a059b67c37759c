"""JSONL run log, one record per CLI invocation, rotated daily."""
from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

DEFAULT_LOG = Path("runs") / "run_log.jsonl"


def append_run_record(record: Dict[str, Any], log_path: Optional[str] = None, daily_rotation: bool = True) -> Optional[Path]:
    """Append one record; failures are logged, never raised."""
    try:
        now = datetime.now(timezone.utc)
        entry = {"timestamp": now.isoformat(), **record}
        base_path = Path(log_path) if log_path else DEFAULT_LOG
        if daily_rotation:
            date_suffix = now.strftime("%Y-%m-%d")
            path = base_path.with_name(f"{base_path.stem}_{date_suffix}{base_path.suffix}")
        else:
            path = base_path
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(entry, default=str) + "\n")
        return path
    except Exception as exc:  # pragma: no cover
        logger.warning("run_log write failed: %s", exc)
        return None
