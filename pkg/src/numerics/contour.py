"""Unit-circle contour integrals of rational functions.

(1/2 pi i) of the closed integral over |u| = 1 of numer(u)/denom(u) du, evaluated as the sum of
residues at the poles strictly inside the circle.
"""
from __future__ import annotations

import logging
from math import factorial
from typing import List, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from src.errors import ContourPinchError
from src.numerics.polynomial import Polynomial, poly_roots

logger = logging.getLogger(__name__)

INSIDE_TOL = 1e-10
CLUSTER_TOL = 1e-6


def classify_roots(roots: np.ndarray, tol: float = INSIDE_TOL) -> np.ndarray:
    """Boolean mask of roots strictly inside C(0,1); raises on roots on the circle."""
    mod = np.abs(roots)
    pinched = np.abs(mod - 1.0) <= tol
    if np.any(pinched):
        raise ContourPinchError([complex(z) for z in roots[pinched]])
    return mod < 1.0 - tol


def _cluster(roots: np.ndarray) -> List[Tuple[complex, int]]:
    """Group numerically coincident roots into (center, multiplicity)."""
    clusters: List[List[complex]] = []
    for z in roots:
        for group in clusters:
            c = np.mean(group)
            if abs(z - c) <= CLUSTER_TOL * (1.0 + abs(c)):
                group.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(np.mean(g)), len(g)) for g in clusters]


def _taylor(coeffs: np.ndarray, a: complex, order: int) -> np.ndarray:
    """First `order` Taylor coefficients of the polynomial at a."""
    out = np.zeros(order, dtype=complex)
    c = coeffs
    for k in range(order):
        out[k] = P.polyval(a, c) / factorial(k)
        c = P.polyder(c) if len(c) > 1 else np.zeros(1, dtype=complex)
    return out


def _series_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    for k in range(len(num)):
        acc = num[k] - np.dot(out[:k], den[k:0:-1]) if k else num[0]
        out[k] = acc / den[0]
    return out


def _residue(numer: np.ndarray, lead: complex, a: complex, m: int, others: np.ndarray) -> complex:
    """Residue of numer / (lead (u-a)^m prod(u - others)) at a."""
    if m == 1:
        return complex(P.polyval(a, numer) / (lead * np.prod(a - others)))
    q = lead * P.polyfromroots(others) if others.size else np.array([lead], dtype=complex)
    series = _series_divide(_taylor(numer, a, m), _taylor(q, a, m))
    return complex(series[m - 1])


def unit_circle_residue_integral(numer: Polynomial, denom: Polynomial) -> complex:
    """Sum of residues of numer/denom at the poles inside the unit circle.

    Args:
        numer: numerator polynomial.
        denom: denominator polynomial with no roots within 1e-10 of |u| = 1.

    Returns:
        The contour integral divided by 2 pi i.
    """
    roots = poly_roots(denom).as_array()
    inside = classify_roots(roots)
    lead = denom.coeffs[-1]
    num = numer.as_array()
    clusters = _cluster(roots)
    total = 0j
    for a, m in clusters:
        if abs(a) >= 1.0 - INSIDE_TOL:
            continue
        others = np.array([z for z in roots if abs(z - a) > CLUSTER_TOL * (1.0 + abs(a))], dtype=complex)
        total += _residue(num, lead, a, m, others)
    logger.debug("residue integral poles_inside=%d total=%s", int(inside.sum()), total)
    return total


def simple_residue_sums(numers: np.ndarray, denoms: np.ndarray, roots: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Vectorised interior residue sums for many rational functions with simple poles.

    Args:
        numers: (n, k) ascending numerator coefficients, or (k,) shared by all rows.
        denoms: (n, d+1) ascending denominator coefficients.
        roots: (n, d) roots of each denominator.
        inside: (n, d) mask of the poles to include.

    Returns:
        Complex array (n,) of residue sums.
    """
    denoms = np.asarray(denoms)
    dden = denoms[:, 1:] * np.arange(1, denoms.shape[1])
    if numers.ndim == 1:
        nv = P.polyval(roots, numers)
    else:
        nv = P.polyval(roots.T, numers.T, tensor=False).T
    dv = P.polyval(roots.T, dden.T, tensor=False).T
    return np.sum(np.where(inside, nv / dv, 0.0), axis=1)


def trapezoid_contour_integral(numer: Polynomial, denom: Polynomial, points: int = 2048) -> complex:
    """Reference quadrature of the same integral with equispaced nodes on C(0,1)."""
    u = np.exp(2j * np.pi * np.arange(points) / points)
    return complex(np.mean(numer(u) / denom(u) * u))
