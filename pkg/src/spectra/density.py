"""Empirical densities and spectrum statistics.

Histogram bins are uniform; bin density is count / (total count * bin width),
or per cell area for 2D grids. Zero modes are excluded and reported separately.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from src.errors import ParameterError
from src.spectra.eigen import SpectrumSample, zero_mode_fraction

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class DensityCurve:
    """Tabulated density: real_line or radial (1D), or grid2d (density[iy, ix])."""

    kind: str
    centers: np.ndarray
    density: np.ndarray
    mass: float
    edges: Optional[np.ndarray] = None
    y_centers: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def widths(self) -> np.ndarray:
        if self.edges is not None:
            return np.diff(self.edges)
        return np.gradient(self.centers) if self.centers.size > 1 else np.ones(1)

    def integral(self) -> float:
        if self.kind == "grid2d":
            return float(self.density.sum() * _cell_area(self))
        if self.edges is not None:
            return float(np.sum(self.density * self.widths()))
        return float(trapezoid(self.density, self.centers))

    def at(self, x) -> np.ndarray:
        """Linear interpolation of a 1D curve, zero outside the tabulated range."""
        return np.interp(x, self.centers, self.density, left=0.0, right=0.0)


def _cell_area(c: DensityCurve) -> float:
    dx = c.centers[1] - c.centers[0] if c.centers.size > 1 else 1.0
    dy = c.y_centers[1] - c.y_centers[0] if c.y_centers is not None and c.y_centers.size > 1 else 1.0
    return float(dx * dy)


def curve_from_samples(kind: str, centers: np.ndarray, density: np.ndarray, **metadata: Any) -> DensityCurve:
    """Theory curve on a grid; mass is the trapezoid integral."""
    centers = np.asarray(centers, dtype=float)
    density = np.asarray(density, dtype=float)
    mass = float(trapezoid(density, centers)) if centers.size > 1 else 0.0
    return DensityCurve(kind, centers, density, mass, metadata=dict(metadata))


def _histogram_1d(kind: str, values: np.ndarray, total: int, nbins: int, lo: float, hi: float, s: SpectrumSample) -> DensityCurve:
    if nbins < 10:
        raise ParameterError(f"nbins must be at least 10, got {nbins}")
    if not hi > lo:
        raise ParameterError(f"empty histogram range [{lo}, {hi}]")
    counts, edges = np.histogram(values, bins=nbins, range=(lo, hi))
    width = edges[1] - edges[0]
    total = max(total, 1)
    density = counts / (total * width)
    zero = zero_mode_fraction(s)
    mass = counts.sum() / total
    centers = 0.5 * (edges[:-1] + edges[1:])
    beyond = (values.size - counts.sum()) / total
    meta = {"zero_mode_fraction": zero, "beyond_fraction": float(beyond), "count": int(total)}
    return DensityCurve(kind, centers, density, float(mass), edges=edges, metadata=meta)


def radial_histogram(s: SpectrumSample, nbins: int, r_max: float) -> DensityCurve:
    """Empirical radial density 2 pi R rho(z) over [0, r_max]."""
    mod = np.abs(s.eigenvalues)
    return _histogram_1d("radial", mod[~s.zero_mask()], s.eigenvalues.size, nbins, 0.0, r_max, s)


def real_histogram(s: SpectrumSample, nbins: int, x_min: float, x_max: float) -> DensityCurve:
    """Empirical density of the real parts over [x_min, x_max]."""
    x = s.eigenvalues.real
    return _histogram_1d("real_line", x[~s.zero_mask()], s.eigenvalues.size, nbins, x_min, x_max, s)


def grid_histogram(s: SpectrumSample, nbins: int, extent: Tuple[float, float, float, float]) -> DensityCurve:
    """2D density of the complex eigenvalues on extent = (x_min, x_max, y_min, y_max)."""
    ev = s.eigenvalues[~s.zero_mask()]
    x0, x1, y0, y1 = extent
    counts, xe, ye = np.histogram2d(ev.real, ev.imag, bins=nbins, range=((x0, x1), (y0, y1)))
    total = max(s.eigenvalues.size, 1)
    area = (xe[1] - xe[0]) * (ye[1] - ye[0])
    density = counts.T / (total * area)
    curve = DensityCurve(
        "grid2d",
        0.5 * (xe[:-1] + xe[1:]),
        density,
        float(counts.sum() / total),
        y_centers=0.5 * (ye[:-1] + ye[1:]),
        metadata={"zero_mode_fraction": zero_mode_fraction(s), "count": int(total)},
    )
    return curve


def rotational_asymmetry(s: SpectrumSample, nsectors: int) -> float:
    """max over angular sectors of |count - mean| / mean."""
    if nsectors < 4:
        raise ParameterError(f"nsectors must be at least 4, got {nsectors}")
    ev = s.eigenvalues[~s.zero_mask()]
    if ev.size == 0:
        return 0.0
    counts, _ = np.histogram(np.angle(ev), bins=nsectors, range=(-np.pi, np.pi))
    mean = ev.size / nsectors
    return float(np.max(np.abs(counts - mean)) / mean)


def asymmetry_threshold(s: SpectrumSample, nsectors: int) -> float:
    """5 / sqrt(count per sector), the cut for rotationally symmetric spectra."""
    count = int((~s.zero_mask()).sum())
    return 5.0 / np.sqrt(max(count / nsectors, 1.0))


def borderline_occupancy(s: SpectrumSample, r_ext: float, r_int: float) -> Tuple[float, float]:
    """Fractions of nonzero eigenvalues beyond r_ext and inside the hole 0 < |z| < r_int."""
    if not r_int < r_ext:
        raise ParameterError(f"r_int={r_int} must be smaller than r_ext={r_ext}")
    mod = np.abs(s.eigenvalues[~s.zero_mask()])
    if mod.size == 0:
        return 0.0, 0.0
    return float(np.mean(mod > r_ext)), float(np.mean(mod < r_int))


def l1_distance(a: DensityCurve, b: DensityCurve, window: Optional[Tuple[float, float]] = None) -> float:
    """L1 distance of b from a on a's grid, optionally restricted to window = (lo, hi)."""
    if a.kind == "grid2d" or b.kind == "grid2d":
        if a.density.shape != b.density.shape:
            raise ParameterError("grid densities must share the same lattice")
        return float(np.abs(a.density - b.density).sum() * _cell_area(a))
    yb = b.at(a.centers)
    mask = np.ones(a.centers.size, dtype=bool)
    if window is not None:
        mask = (a.centers >= window[0]) & (a.centers <= window[1])
    return float(np.sum(np.abs(a.density - yb)[mask] * a.widths()[mask]))
