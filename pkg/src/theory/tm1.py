"""Closed-form TLCE results for uncorrelated Gaussian returns (C = sigma^2 I, A = I).

All formulas are written for sigma = 1 in the scaled radius R / sigma^2; radial
densities pick up a factor 1 / sigma^2.
"""
from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np

from src.errors import MultipleRealRootsError
from src.numerics.polynomial import Polynomial, poly_roots_batch, real_roots, solve_depressed_cubic_unique_real
from src.spectra.density import DensityCurve, curve_from_samples

logger = logging.getLogger(__name__)

REAL_PART_EPSILON = 1e-7
TRACK_RATIO = 1.5


def tm1_tlce_radii(r: float, sigma: float = 1.0) -> Tuple[float, float]:
    """(R_ext, R_int): R_ext^2 = sigma^4 r (1 + r), R_int^2 = sigma^4 (r - 1)^3 / r for r > 1."""
    s4 = sigma ** 4
    r_ext = math.sqrt(s4 * r * (1.0 + r))
    r_int = math.sqrt(s4 * (r - 1.0) ** 3 / r) if r > 1 else 0.0
    return r_ext, r_int


def tm1_m_cubic(R: float, r: float) -> Polynomial:
    """Cubic in M at scaled radius R (sigma = 1)."""
    return Polynomial.from_coeffs([
        (1.0 + r) * (r * (1.0 + r) - R * R),
        r * ((1.0 + r) * (1.0 + 5.0 * r) - R * R),
        4.0 * r * r * (1.0 + 2.0 * r),
        4.0 * r ** 3,
    ])


def tm1_tlce_solution(R: float, r: float, sigma: float = 1.0) -> Tuple[float, float]:
    """(M, m) at radius R from the cubic; M = 0 outside, M = -1/r in the hole."""
    r_ext, r_int = tm1_tlce_radii(r, sigma)
    m_lo = -min(1.0, 1.0 / r)
    if R >= r_ext:
        return 0.0, 0.0
    if R <= r_int:
        return m_lo, 0.0
    rs = R / sigma ** 2
    roots = real_roots(tm1_m_cubic(rs, r), imag_tol=1e-7)
    admissible = roots[(roots >= m_lo - 1e-12) & (roots <= 1e-12)]
    M = float(np.clip(admissible.max(), m_lo, 0.0)) if admissible.size else m_lo
    if not m_lo < M < 0:
        return M, 0.0
    s = math.sqrt(-(1.0 + 1.0 / (r * M)))
    return M, M * rs * s / (1.0 + r + 2.0 * r * M)


def _density_scaled(R: float, r: float) -> float:
    R2 = R * R
    a = 4.0 * r ** 3 * (R2 * R2 - (11.0 + 14.0 * r + 2.0 * r * r) * R2 - (1.0 - r * r) * (1.0 - r) ** 2)
    b = r * (-R2 * R2 + 2.0 * (1.0 + r) * (5.0 + r) * R2 - (1.0 - r * r) ** 2)
    c = 2.0 * (1.0 + r) ** 2 * R
    return solve_depressed_cubic_unique_real(b / a, c / a)


def tm1_tlce_radial_density(R, r: float, sigma: float = 1.0):
    """Radial density rho_rad(R) = dM/dR from the depressed cubic; 0 off the support.

    Falls back to differentiating the M-cubic where the density cubic has three real roots.
    """
    r_ext, r_int = tm1_tlce_radii(r, sigma)
    Rs = np.atleast_1d(np.asarray(R, dtype=float))
    out = np.zeros(Rs.size)
    s2 = sigma ** 2
    for i, Rv in enumerate(Rs):
        if not r_int < Rv < r_ext:
            continue
        try:
            out[i] = _density_scaled(Rv / s2, r) / s2
        except MultipleRealRootsError:
            h = 1e-5 * r_ext
            h = min(h, 0.5 * (Rv - r_int), 0.5 * (r_ext - Rv))
            out[i] = (tm1_tlce_solution(Rv + h, r, sigma)[0] - tm1_tlce_solution(Rv - h, r, sigma)[0]) / (2.0 * h)
    out = np.clip(out, 0.0, None)
    return float(out[0]) if np.ndim(R) == 0 else out


def tm1_tlce_density_curve(r: float, sigma: float = 1.0, nbins: int = 200) -> DensityCurve:
    r_ext, r_int = tm1_tlce_radii(r, sigma)
    edges = np.linspace(r_int, r_ext, nbins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    rho = tm1_tlce_radial_density(centers, r, sigma)
    meta = {"solver": "tm1_cubic", "r": r, "sigma": sigma, "r_ext": r_ext, "r_int": r_int}
    return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata=meta)


def _real_part_coeffs(z: np.ndarray, r: float) -> np.ndarray:
    """Ascending quartic coefficients in M of the real-part spectrum, one row per z."""
    z2 = z * z
    ones = np.ones_like(z)
    return np.stack([
        ones,
        2.0 * (1.0 + r - z2 / r),
        1.0 + 4.0 * r + r * r - z2,
        2.0 * r * (1.0 + r) * ones,
        r * r * ones,
    ], axis=1)


def tm1_real_part_density(x, r: float, sigma: float = 1.0, epsilon: float = REAL_PART_EPSILON) -> np.ndarray:
    """Density of the eigenvalues of (c + c^dagger) / 2 from the quartic in M.

    All x are tracked together from x + 10 i (scaled units) down to x + i epsilon,
    following at each level the quartic root closest to the previous one.
    """
    s2 = sigma ** 2
    xs = np.atleast_1d(np.asarray(x, dtype=float)) / s2
    y0 = 10.0 * (1.0 + r + float(np.max(np.abs(xs), initial=0.0)))
    levels = [y0]
    while levels[-1] > epsilon:
        levels.append(max(epsilon, levels[-1] / TRACK_RATIO))
    M = None
    for y in levels:
        z = xs + 1j * y
        roots = poly_roots_batch(_real_part_coeffs(z, r))
        guess = r / (2.0 * z * z) if M is None else M
        pick = np.argmin(np.abs(roots - guess[:, None]), axis=1)
        M = roots[np.arange(xs.size), pick]
    z = xs + 1j * epsilon
    rho = -((M + 1.0) / z).imag / math.pi
    logger.debug("real_part_density r=%.4g points=%d min=%.3e", r, xs.size, float(rho.min()) if rho.size else 0.0)
    return np.clip(rho, 0.0, None) / s2


def tm1_real_part_curve(r: float, sigma: float = 1.0, points: int = 401) -> DensityCurve:
    r_ext, _ = tm1_tlce_radii(r, sigma)
    xs = np.linspace(-r_ext, r_ext, points)
    return curve_from_samples("real_line", xs, tm1_real_part_density(xs, r, sigma), solver="tm1_quartic", r=r, sigma=sigma)
