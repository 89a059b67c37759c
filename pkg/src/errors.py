"""Error hierarchy shared by every module.

Each class carries the process exit code the CLI maps it to:
0 success, 1 generic failure, 2 validation, 3 unsupported theory, 4 numerical failure.
"""
from __future__ import annotations

from typing import Any, List, Optional


class SpectraError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParameterError(SpectraError, ValueError):
    """Invalid model, distribution, estimator or run parameters."""

    exit_code = 2


class UnboundedQuantileError(ParameterError):
    def __init__(self, q: float):
        super().__init__(f"unbounded quantile: q={q} must lie in [0, 1)")
        self.q = q


class DegenerateBetasError(ParameterError):
    def __init__(self, alpha: float, gamma: float):
        super().__init__(f"degenerate betas: alpha={alpha} equals gamma={gamma}")
        self.alpha = alpha
        self.gamma = gamma


class LagTooLargeError(ParameterError):
    pass


class EmptyWindowError(ParameterError):
    pass


class UnknownFigureError(ParameterError):
    pass


class UnsupportedTheoryError(SpectraError):
    """No theoretical solver exists for the requested model/estimator pair."""

    exit_code = 3


class NumericalError(SpectraError, ArithmeticError):
    """A numerical kernel or solver failed to meet its contract."""

    exit_code = 4


class ZeroPolynomialError(NumericalError):
    def __init__(self) -> None:
        super().__init__("zero polynomial")


class ContourPinchError(NumericalError):
    def __init__(self, roots: List[complex]):
        super().__init__(f"contour pinch: roots on the unit circle {roots}")
        self.roots = roots


class MultipleRealRootsError(NumericalError):
    def __init__(self, p: float, q: float):
        super().__init__(f"multiple real roots: discriminant of t^3 + {p}t + {q} is nonnegative")
        self.p = p
        self.q = q


class SolverDivergedError(NumericalError):
    def __init__(self, message: str, last_iterate: Any = None):
        super().__init__(f"diverged: {message}")
        self.last_iterate = last_iterate


class NoBracketError(NumericalError):
    def __init__(self, a: float, b: float, fa: float, fb: float):
        super().__init__(f"no bracket: f({a})={fa} and f({b})={fb} share a sign")
        self.a, self.b = a, b


class ContinuationError(NumericalError):
    def __init__(self, message: str, last_good: Optional[complex] = None):
        super().__init__(f"continuation failed: {message} (last good point {last_good})")
        self.last_good = last_good


class RootClassificationError(NumericalError):
    def __init__(self, inside: int, expected: int):
        super().__init__(f"root classification failure: {inside} roots inside, expected {expected}")
        self.inside = inside
        self.expected = expected


class EdgeAmbiguityError(NumericalError):
    def __init__(self, roots: List[float]):
        super().__init__(f"edge ambiguity: admissible edge roots {roots}")
        self.roots = roots


class BranchAnomalyError(NumericalError):
    def __init__(self, g: complex, roots: List[float]):
        super().__init__(f"branch anomaly: {len(roots)} h-roots at G={g}")
        self.g = g
        self.roots = roots


class NegativeDensityError(NumericalError):
    pass


class GridMissError(NumericalError):
    def __init__(self) -> None:
        super().__init__("grid bounds miss the borderline")


class NonHermitianCovarianceError(NumericalError):
    def __init__(self, lag: int):
        super().__init__(f"non-Hermitian true covariance at this lag (c={lag})")
        self.lag = lag
