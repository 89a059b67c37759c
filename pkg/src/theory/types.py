"""Value types shared by the theory solvers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.optimize import brentq

from src.errors import NoBracketError, ParameterError
from src.spectra.density import DensityCurve


@dataclass(frozen=True, eq=False)
class MTransform:
    """Holomorphic M-transform M(z) = sum_k lambda_k / (z - lambda_k) / N of a positive prior.

    Moments are m_k = <lambda^k>; m2 may be infinite (heavy-tailed priors) and the
    negative moments are only filled in where a radius formula needs them.
    """

    name: str
    evaluate: Callable[[complex], complex]
    m1: float
    m2: float
    m_neg1: Optional[float] = None
    m_neg2: Optional[float] = None
    prime: Optional[Callable[[complex], complex]] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, z: complex) -> complex:
        return complex(self.evaluate(complex(z)))

    @property
    def scale(self) -> float:
        """Spectral scale used to start continuations: sqrt(m2), else m1, else 1/m_{-1}."""
        if math.isfinite(self.m2) and self.m2 > 0:
            return math.sqrt(self.m2)
        if math.isfinite(self.m1):
            return self.m1
        return 1.0 / self.m_neg1 if self.m_neg1 else 1.0

    def derivative(self, z: complex) -> complex:
        if self.prime is not None:
            return complex(self.prime(complex(z)))
        h = 1e-6 * max(1.0, abs(z))
        return (self(z + h) - self(z - h)) / (2 * h)

    def inverse_negative(self, w: float) -> float:
        """N(w): the negative real z with M(z) = w, for w in (-1, 0).

        M is real and increasing on the negative axis, from -1 at 0^- to 0 at -inf.
        """
        if not -1.0 < w < 0.0:
            raise ParameterError(f"inverse on the negative axis needs w in (-1, 0), got {w}")

        def f(x: float) -> float:
            return self(x).real - w

        hi = -1e-12 * self.scale
        lo = -self.scale
        for _ in range(200):
            if f(lo) > 0:
                break
            lo *= 2.0
        else:
            raise NoBracketError(lo, hi, f(lo), f(hi))
        if f(hi) > 0:
            raise NoBracketError(lo, hi, f(lo), f(hi))
        return float(brentq(f, lo, hi, xtol=1e-14 * self.scale, rtol=1e-14, maxiter=500))


@dataclass(eq=False)
class Borderline:
    """Boundary of a mean spectral domain.

    circle_pair carries r_ext and r_int; parametric_curve and grid_trace carry complex
    points with a branch label per point (0 external, 1 internal).
    """

    kind: str
    r_ext: Optional[float] = None
    r_int: Optional[float] = None
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    branch: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in ("circle_pair", "parametric_curve", "grid_trace"):
            raise ParameterError(f"unknown borderline kind {self.kind!r}")
        if self.r_ext is not None and self.r_int is not None and not self.r_int < self.r_ext:
            raise ParameterError(f"r_int={self.r_int} must be smaller than r_ext={self.r_ext}")


@dataclass(eq=False)
class GridSolution:
    """Lattice solution of the exponential-kernel TLCE master system.

    g: (ny, nx) lattice of G values; h: (ny, nx, 2) h-roots, NaN where absent;
    z: (ny, nx, 2) mapped eigenvalue-plane points; counts: roots per lattice point.
    """

    g: np.ndarray
    h: np.ndarray
    z: np.ndarray
    counts: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if np.any(self.counts > 2):
            raise ParameterError("a lattice point carries more than two h-roots")


@dataclass(eq=False)
class TheoryCurve:
    """One named theory output: a density, a borderline and/or scalar values."""

    name: str
    curve: Optional[DensityCurve] = None
    borderline: Optional[Borderline] = None
    values: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)
