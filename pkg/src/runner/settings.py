"""Solver tolerances per model kind from config/solver_defaults.json."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

DEFAULT_PATH = Path("config") / "solver_defaults.json"

BUILTIN: Dict[str, Dict[str, Any]] = {
    "default": {
        "etce_epsilon": 1e-6,
        "grid_points": 400,
        "radial_bins": 200,
        "grid_resolution": 121,
        "grid_refine": 5,
        "compare_threshold": 0.02,
    }
}


def load_solver_settings(kind: str, path: Optional[str] = None) -> Dict[str, Any]:
    """Default block merged with the block for `kind`; built-ins when the file is missing or unreadable."""
    cfg = BUILTIN
    p = Path(path) if path else DEFAULT_PATH
    try:
        if p.exists():
            cfg = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        logger.warning("solver_settings path=%s unreadable (%s); using built-in defaults", p, exc)
    base = {**BUILTIN["default"], **cfg.get("default", {})}
    return {**base, **cfg.get(kind, {})}
