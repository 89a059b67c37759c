"""CSV and JSON artifacts.

CSV files start with a block of `# key: value` lines (values JSON-encoded) followed
by the pandas-written table. Float formatting is fixed so identical runs write
identical bytes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from src.spectra.density import DensityCurve
from src.spectra.eigen import SpectrumSample
from src.theory.types import Borderline

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


def _jsonable(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return str(v)


def write_csv(path: Path, frame: pd.DataFrame, header: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        for key in sorted(header):
            f.write(f"# {key}: {json.dumps(header[key], sort_keys=True, default=_jsonable)}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("csv path=%s rows=%d", path, len(frame))
    return path


def read_csv(path: Path) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """Header mapping and table of a CSV written by write_csv."""
    path = Path(path)
    header: Dict[str, Any] = {}
    with path.open("r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("# "):
                break
            key, _, raw = line[2:].rstrip("\n").partition(": ")
            try:
                header[key] = json.loads(raw)
            except ValueError:
                header[key] = raw
    frame = pd.read_csv(path, comment="#")
    return header, frame


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_jsonable), encoding="utf-8")
    return path


def eigenvalue_frame(s: SpectrumSample) -> pd.DataFrame:
    return pd.DataFrame({"re": s.eigenvalues.real, "im": s.eigenvalues.imag})


def curve_frame(curve: DensityCurve) -> pd.DataFrame:
    if curve.kind == "grid2d":
        xx, yy = np.meshgrid(curve.centers, curve.y_centers)
        return pd.DataFrame({"x": xx.ravel(), "y": yy.ravel(), "density": curve.density.ravel()})
    return pd.DataFrame({"bin_center": curve.centers, "density": curve.density})


def curve_header(curve: DensityCurve) -> Dict[str, Any]:
    header = {"kind": curve.kind, "mass": curve.mass}
    if curve.edges is not None:
        header["edges"] = [float(curve.edges[0]), float(curve.edges[-1])]
    for key, value in curve.metadata.items():
        if np.isscalar(value) or isinstance(value, (list, tuple)):
            header[key] = value
    return header


def curve_from_csv(path: Path) -> Tuple[Dict[str, Any], DensityCurve]:
    """Rebuild a DensityCurve from its CSV; grid2d curves come back on their lattice."""
    header, frame = read_csv(path)
    kind = header.get("kind", "real_line")
    if kind == "grid2d":
        xs = np.unique(frame["x"].to_numpy())
        ys = np.unique(frame["y"].to_numpy())
        density = frame["density"].to_numpy().reshape(ys.size, xs.size)
        curve = DensityCurve(kind, xs, density, float(header.get("mass", 0.0)), y_centers=ys, metadata=header)
        return header, curve
    centers = frame["bin_center"].to_numpy()
    density = frame["density"].to_numpy()
    edges = None
    if "edges" in header and centers.size > 1:
        lo, hi = header["edges"]
        edges = np.linspace(lo, hi, centers.size + 1)
    return header, DensityCurve(kind, centers, density, float(header.get("mass", 0.0)), edges=edges, metadata=header)


def borderline_frame(b: Borderline) -> pd.DataFrame:
    if b.kind == "circle_pair":
        theta = np.linspace(0.0, 2.0 * np.pi, 361)
        rows = [(b.r_ext * np.cos(theta), b.r_ext * np.sin(theta), np.zeros(theta.size, dtype=int))]
        if b.r_int:
            rows.append((b.r_int * np.cos(theta), b.r_int * np.sin(theta), np.ones(theta.size, dtype=int)))
        x, y, br = (np.concatenate(parts) for parts in zip(*rows))
        return pd.DataFrame({"x": x, "y": y, "branch": br})
    return pd.DataFrame({"x": b.points.real, "y": b.points.imag, "branch": b.branch})
