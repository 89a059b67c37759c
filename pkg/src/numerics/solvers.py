"""Nonlinear solvers: damped Newton in R^n and C, and bracketed scalar roots."""
from __future__ import annotations

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from src.errors import NoBracketError, SolverDivergedError

logger = logging.getLogger(__name__)

MAX_ITER = 200
MAX_HALVINGS = 30


def _fd_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    n = x.size
    jac = np.empty((fx.size, n))
    for j in range(n):
        h = 1e-7 * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(f(xp), dtype=float) - np.asarray(f(xm), dtype=float)) / (2 * h)
    return jac


def solve_real_system(
    f: Callable[[np.ndarray], Sequence[float]],
    start: Sequence[float],
    tol: float = 1e-11,
    max_iter: int = MAX_ITER,
) -> np.ndarray:
    """Damped Newton iteration with a central-difference Jacobian.

    Each step is halved until the residual sup-norm decreases, at most 30 times.

    Args:
        f: map from an n-vector to an n-vector of residuals.
        start: initial iterate.
        tol: sup-norm residual target.
        max_iter: Newton iterations before giving up.

    Returns:
        The converged iterate.
    """
    x = np.asarray(start, dtype=float).copy()
    fx = np.asarray(f(x), dtype=float)
    norm = float(np.max(np.abs(fx)))
    if not np.isfinite(norm):
        raise SolverDivergedError("non-finite residual at start", x)
    for it in range(max_iter):
        if norm < tol:
            return x
        jac = _fd_jacobian(f, x, fx)
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -fx, rcond=None)[0]
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            cand = x + lam * step
            fc = np.asarray(f(cand), dtype=float)
            nc = float(np.max(np.abs(fc)))
            if np.isfinite(nc) and nc < norm:
                break
            lam *= 0.5
        else:
            raise SolverDivergedError(f"no descent after {MAX_HALVINGS} halvings (iteration {it}, residual {norm:.3e})", x)
        x, fx, norm = cand, fc, nc
    if norm < tol:
        return x
    raise SolverDivergedError(f"no convergence in {max_iter} iterations (residual {norm:.3e})", x)


def solve_real_pair(
    f: Callable[[float, float], Tuple[float, float]],
    start: Tuple[float, float],
    tol: float = 1e-11,
) -> Tuple[float, float]:
    """Two-unknown wrapper around solve_real_system."""
    x = solve_real_system(lambda v: f(v[0], v[1]), start, tol)
    return float(x[0]), float(x[1])


def complex_newton(
    f: Callable[[complex], complex],
    start: complex,
    tol: float = 1e-12,
    max_iter: int = 100,
    fprime: Optional[Callable[[complex], complex]] = None,
) -> complex:
    """Damped Newton for a holomorphic scalar equation f(z) = 0."""
    z = complex(start)
    fz = f(z)
    norm = abs(fz)
    for it in range(max_iter):
        if norm < tol:
            return z
        if fprime is not None:
            d = fprime(z)
        else:
            h = 1e-7 * max(1.0, abs(z))
            d = (f(z + h) - f(z - h)) / (2 * h)
        if d == 0 or not np.isfinite(d):
            raise SolverDivergedError(f"vanishing derivative at iteration {it}", z)
        step = -fz / d
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            cand = z + lam * step
            fc = f(cand)
            if np.isfinite(fc) and abs(fc) < norm:
                break
            lam *= 0.5
        else:
            raise SolverDivergedError(f"no descent after {MAX_HALVINGS} halvings (residual {norm:.3e})", z)
        z, fz, norm = cand, fc, abs(fc)
    if norm < tol:
        return z
    raise SolverDivergedError(f"no convergence in {max_iter} iterations (residual {norm:.3e})", z)


def bracket_root(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    """Root of a real function on [a, b] given a sign change (Brent's method)."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return float(a)
    if fb == 0:
        return float(b)
    if np.sign(fa) == np.sign(fb):
        raise NoBracketError(a, b, fa, fb)
    return float(brentq(f, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


def scan_brackets(f: Callable[[float], float], grid: np.ndarray) -> List[Tuple[float, float]]:
    """Adjacent grid pairs on which f changes sign."""
    vals = np.array([f(x) for x in grid])
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    return [(float(grid[i]), float(grid[i + 1])) for i in idx]
