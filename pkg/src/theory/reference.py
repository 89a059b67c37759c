"""Reference ensembles and the finite-size erfc form factor at a borderline."""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import minimize_scalar

from src.errors import EmptyWindowError, ParameterError
from src.numerics.special import special_erfc
from src.spectra.density import DensityCurve, curve_from_samples

logger = logging.getLogger(__name__)

WINDOW_WIDTH = 5.0
Q_BOUNDS = (1e-3, 100.0)


def gue_density(x, sigma: float = 1.0):
    """Wigner semicircle of radius 2 sigma."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 2.0 * sigma
    rho = np.where(inside, np.sqrt(np.clip(4.0 * sigma ** 2 - x * x, 0.0, None)) / (2.0 * math.pi * sigma ** 2), 0.0)
    return float(rho) if rho.ndim == 0 else rho


def ginue_radial_density(R, sigma: float = 1.0):
    """Radial density 2R / sigma^2 of the uniform Ginibre disk of radius sigma."""
    R = np.asarray(R, dtype=float)
    rho = np.where((R >= 0) & (R <= sigma), 2.0 * R / sigma ** 2, 0.0)
    return float(rho) if rho.ndim == 0 else rho


def reference_densities(kind: str, sigma: float = 1.0, points: int = 401) -> DensityCurve:
    """Closed-form GUE (real line) or GinUE (radial) density curve."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if kind == "GUE":
        xs = np.linspace(-2.0 * sigma, 2.0 * sigma, points)
        return curve_from_samples("real_line", xs, gue_density(xs, sigma), ensemble="GUE", sigma=sigma)
    if kind == "GinUE":
        rs = np.linspace(0.0, sigma, points)
        return curve_from_samples("radial", rs, ginue_radial_density(rs, sigma), ensemble="GinUE", sigma=sigma, density_2d=1.0 / (math.pi * sigma ** 2))
    raise ParameterError(f"unknown reference ensemble {kind!r}; expected GUE or GinUE")


def erfc_form_factor(R, n: int, q: float, r_b: float, s_b: int):
    """1/2 erfc(q s_b (R - R_b) sqrt(N))."""
    if n < 1:
        raise ParameterError(f"N must be at least 1, got {n}")
    if s_b not in (1, -1):
        raise ParameterError(f"s_b must be +1 or -1, got {s_b}")
    R = np.asarray(R, dtype=float)
    return 0.5 * special_erfc(q * s_b * (R - r_b) * math.sqrt(n))


def _extended_theory(theory: DensityCurve, R: np.ndarray, r_b: float, s_b: int) -> np.ndarray:
    """Theory inside the domain, continued past R_b with the 2D density frozen at its edge value."""
    inside = theory.centers[(theory.centers - r_b) * s_b < 0]
    if inside.size == 0:
        raise EmptyWindowError(f"theory curve has no support on the inner side of R_b={r_b}")
    edge_r = inside.max() if s_b > 0 else inside.min()
    edge_rho = float(theory.at(edge_r))
    beyond = (R - r_b) * s_b >= 0
    return np.where(beyond, edge_rho * R / max(edge_r, 1e-300), theory.at(R))


def form_factor_curve(theory: DensityCurve, centers: np.ndarray, n: int, q: float, r_b: float, s_b: int) -> DensityCurve:
    """Theory times the form factor on the given radii."""
    centers = np.asarray(centers, dtype=float)
    rho = _extended_theory(theory, centers, r_b, s_b) * erfc_form_factor(centers, n, q, r_b, s_b)
    return curve_from_samples("radial", centers, rho, q=q, r_b=r_b, s_b=s_b, n=n)


def fit_q(empirical: DensityCurve, theory: DensityCurve, r_b: float, s_b: int, n: int) -> float:
    """q minimising the squared deviation of theory x form factor from the histogram.

    Only bins with |R - R_b| <= 5 / sqrt(N) enter the fit.
    """
    half = WINDOW_WIDTH / math.sqrt(n)
    mask = np.abs(empirical.centers - r_b) <= half
    if not np.any(mask):
        raise EmptyWindowError(f"no histogram bins within {half:.4g} of R_b={r_b}")
    R = empirical.centers[mask]
    target = empirical.density[mask]
    base = _extended_theory(theory, R, r_b, s_b)

    def loss(q: float) -> float:
        return float(np.sum((base * erfc_form_factor(R, n, q, r_b, s_b) - target) ** 2))

    res = minimize_scalar(loss, bounds=Q_BOUNDS, method="bounded", options={"xatol": 1e-6})
    logger.info("fit_q r_b=%.6g s_b=%d n=%d q=%.5g bins=%d", r_b, s_b, n, res.x, int(mask.sum()))
    return float(res.x)
