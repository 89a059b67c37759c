"""Polynomial containers and root extraction.

Coefficients are stored in ascending degree order, matching numpy.polynomial.polynomial.
Roots come from companion-matrix eigenvalues followed by a Newton polish.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from src.errors import MultipleRealRootsError, ParameterError, ZeroPolynomialError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Polynomial:
    coeffs: Tuple[complex, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex]) -> "Polynomial":
        """Build a polynomial, trimming zero leading coefficients."""
        arr = np.atleast_1d(np.asarray(list(coeffs), dtype=complex))
        nz = np.flatnonzero(arr)
        if nz.size == 0:
            return cls((0j,))
        return cls(tuple(complex(c) for c in arr[: nz[-1] + 1]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, z):
        return P.polyval(z, self.as_array())

    def derivative(self, order: int = 1) -> "Polynomial":
        if self.degree < order:
            return Polynomial((0j,))
        return Polynomial.from_coeffs(P.polyder(self.as_array(), order))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial.from_coeffs(P.polymul(self.as_array(), other.as_array()))


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial, repeated according to multiplicity."""

    roots: Tuple[complex, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.roots, dtype=complex)

    def __len__(self) -> int:
        return len(self.roots)

    def vieta_residual(self, p: Polynomial) -> float:
        """|sum(roots) + c_{n-1}/c_n| scaled by (1 + |c_{n-1}/c_n|)."""
        c = p.as_array()
        ratio = c[-2] / c[-1]
        return float(abs(self.as_array().sum() + ratio) / (1.0 + abs(ratio)))


def polish_root(p: Polynomial, root: complex, steps: int = 3) -> complex:
    """Newton-polish one root, keeping a step only when it lowers |p|."""
    c = p.as_array()
    dc = P.polyder(c)
    z = complex(root)
    fz = abs(P.polyval(z, c))
    for _ in range(steps):
        d = P.polyval(z, dc)
        if d == 0 or fz == 0:
            break
        cand = z - P.polyval(z, c) / d
        fc = abs(P.polyval(cand, c))
        if not np.isfinite(fc) or fc >= fz:
            break
        z, fz = cand, fc
    return z


def poly_roots(p: Polynomial) -> RootSet:
    """All roots of p with multiplicity.

    Args:
        p: polynomial of degree >= 1.

    Returns:
        RootSet with p.degree entries.
    """
    if p.is_zero:
        raise ZeroPolynomialError()
    if p.degree < 1:
        raise ParameterError(f"poly_roots needs degree >= 1, got constant {p.coeffs[0]}")
    c = p.as_array()
    raw = P.polyroots(c)
    roots = np.array([polish_root(p, z) for z in np.atleast_1d(raw)], dtype=complex)
    scale = np.max(np.abs(c))
    resid = np.max(np.abs(P.polyval(roots, c))) / scale
    if resid >= RESIDUAL_TOL:
        logger.debug("poly_roots degree=%d residual=%.3e above tolerance", p.degree, resid)
    return RootSet(tuple(complex(z) for z in roots))


def poly_roots_batch(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials of equal degree at once.

    Args:
        coeffs: array (n, d+1) of ascending coefficients with nonzero leading terms.

    Returns:
        Complex array (n, d) of roots from stacked companion matrices.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n, m = coeffs.shape
    d = m - 1
    if d < 1:
        raise ParameterError("poly_roots_batch needs degree >= 1")
    lead = coeffs[:, -1]
    if np.any(lead == 0):
        raise ZeroPolynomialError()
    comp = np.zeros((n, d, d), dtype=complex)
    if d > 1:
        idx = np.arange(d - 1)
        comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -coeffs[:, :-1] / lead[:, None]
    return np.linalg.eigvals(comp)


def solve_depressed_cubic_unique_real(p: float, q: float) -> float:
    """Unique real root of t^3 + p t + q with negative discriminant.

    Closed form t = a - p/(3a) with the larger-magnitude cube root for a,
    followed by one Newton step.
    """
    disc = -4.0 * p ** 3 - 27.0 * q ** 2
    if disc >= 0:
        raise MultipleRealRootsError(p, q)
    s = np.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
    sign = 1.0 if q >= 0 else -1.0
    a = float(np.cbrt(-q / 2.0 - sign * s))
    t = a - p / (3.0 * a)
    dt = 3.0 * t * t + p
    if dt != 0:
        t = t - (t ** 3 + p * t + q) / dt
    return float(t)


def real_roots(p: Polynomial, imag_tol: float = 1e-9) -> np.ndarray:
    """Sorted real parts of roots whose imaginary part is negligible."""
    z = poly_roots(p).as_array()
    keep = np.abs(z.imag) <= imag_tol * np.maximum(1.0, np.abs(z))
    return np.sort(z[keep].real)


def from_descending(coeffs: Sequence[complex]) -> Polynomial:
    """Polynomial from highest-degree-first coefficients."""
    return Polynomial.from_coeffs(list(coeffs)[::-1])
