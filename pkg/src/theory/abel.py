"""Abel-transform relation between the TLCE radial density and its Hermitian-part density.

The relation is exact for the Ginibre/GUE pair and fails for the TLCE; abel_falsify
measures both.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.integrate import quad

from src.errors import ParameterError
from src.spectra.density import DensityCurve, curve_from_samples
from src.theory.reference import ginue_radial_density, gue_density
from src.theory.tm1 import tm1_real_part_density, tm1_tlce_radial_density, tm1_tlce_radii

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 81
DERIVATIVE_STEP = 1e-4


class AbelComparison(NamedTuple):
    lhs: DensityCurve
    rhs: DensityCurve
    max_discrepancy: float
    control_discrepancy: float


def abel_forward(rho_rad: Callable[[float], float], r_ext: float, x) -> np.ndarray:
    """x-marginal of a rotationally symmetric 2D density: (1/pi) int rho_rad(R) / R du, R = sqrt(x^2 + u^2)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(xs.size)
    for i, xv in enumerate(xs):
        if abs(xv) >= r_ext:
            continue
        top = math.sqrt(r_ext * r_ext - xv * xv)

        def integrand(u: float) -> float:
            R = math.hypot(xv, u)
            return rho_rad(R) / R if R > 0 else 0.0

        out[i] = quad(integrand, 0.0, top, limit=200)[0] / math.pi
    return out


def abel_inverse(
    real_density: Callable[[float], float],
    R,
    x_max: float,
    derivative: Optional[Callable[[float], float]] = None,
) -> np.ndarray:
    """Radial density whose x-marginal is real_density.

    rho_rad(R) = -2R int_0^sqrt(x_max^2 - R^2) f'(x) / x dv with x = sqrt(R^2 + v^2).
    Without an analytic derivative f' is taken by central differences.
    """
    if derivative is None:
        h = DERIVATIVE_STEP * x_max

        def derivative(x: float) -> float:
            return (real_density(x + h) - real_density(x - h)) / (2.0 * h)

    Rs = np.atleast_1d(np.asarray(R, dtype=float))
    out = np.zeros(Rs.size)
    for i, Rv in enumerate(Rs):
        if not 0 < Rv < x_max:
            continue
        top = math.sqrt(x_max * x_max - Rv * Rv)

        def integrand(v: float) -> float:
            x = math.hypot(Rv, v)
            return derivative(x) / x

        out[i] = -2.0 * Rv * quad(integrand, 0.0, top, limit=200)[0]
    return out


def _control(points: int, sigma: float = 1.0) -> float:
    """Max |LHS - RHS| for the Ginibre disk and its GUE Hermitian part."""
    xs = np.linspace(-0.98 * sigma, 0.98 * sigma, points)
    lhs = math.sqrt(2.0) * gue_density(math.sqrt(2.0) * xs, sigma / math.sqrt(2.0))
    rhs = abel_forward(lambda R: ginue_radial_density(R, sigma), sigma, xs)
    return float(np.max(np.abs(lhs - rhs)))


def abel_falsify(r: float, sigma: float = 1.0, points: int = DEFAULT_POINTS) -> AbelComparison:
    """Both sides of the Abel relation for the Gaussian TLCE at ratio r in (0, 1].

    LHS is sqrt(2) rho_H(sqrt(2) x) from the quartic, RHS the x-marginal of the cubic
    radial density; the Ginibre/GUE control is evaluated alongside.
    """
    if not 0 < r <= 1:
        raise ParameterError(f"the Abel study needs r in (0, 1], got {r}")
    r_ext, _ = tm1_tlce_radii(r, sigma)
    xs = np.linspace(-0.98 * r_ext, 0.98 * r_ext, points)
    lhs = math.sqrt(2.0) * tm1_real_part_density(math.sqrt(2.0) * xs, r, sigma)
    rhs = abel_forward(lambda R: tm1_tlce_radial_density(R, r, sigma), r_ext, xs)
    worst = float(np.max(np.abs(lhs - rhs)))
    control = _control(points)
    logger.info("abel_falsify r=%.4g max_discrepancy=%.4e control=%.4e", r, worst, control)
    return AbelComparison(
        curve_from_samples("real_line", xs, lhs, side="lhs", r=r),
        curve_from_samples("real_line", xs, rhs, side="rhs", r=r),
        worst,
        control,
    )


def abel_derived_radial_curve(r: float, sigma: float = 1.0, nbins: int = 100) -> DensityCurve:
    """Radial density an Abel inversion of the Hermitian-part density would predict."""
    r_ext, _ = tm1_tlce_radii(r, sigma)
    x_max = 1.2 * r_ext
    grid = np.linspace(-x_max, x_max, 2001)
    lhs = math.sqrt(2.0) * tm1_real_part_density(math.sqrt(2.0) * grid, r, sigma)

    def f(x: float) -> float:
        return float(np.interp(x, grid, lhs, left=0.0, right=0.0))

    edges = np.linspace(0.0, x_max, nbins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    rho = np.clip(abel_inverse(f, centers, x_max), 0.0, None)
    return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata={"solver": "abel_inverse", "r": r})
