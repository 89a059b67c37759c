"""Equal-time covariance estimator (ETCE) spectra.

The Marchenko-Pastur law in closed form, the general Case 2 master equation solved
by vertical continuation from large |z|, the sector polynomial oracle and the
two-unknown system of sectors with an exponential temporal kernel.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence, Tuple, TypeVar

import numpy as np
from numpy.polynomial import polynomial as P

from src.errors import ContinuationError, ParameterError
from src.covariance.kernels import exponential_kernel_params
from src.numerics.polynomial import Polynomial
from src.numerics.solvers import complex_newton, solve_real_system
from src.theory.types import MTransform

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-6
START_FACTOR = 10.0
STEP_RATIO = 1.5
MAX_SPLITS = 8
PHYSICAL_TOL = 1e-9

S = TypeVar("S")


def mp_edges(r: float, sigma: float = 1.0) -> Tuple[float, float]:
    """Support edges x_- , x_+ = sigma^2 (1 -/+ sqrt r)^2."""
    s2 = sigma ** 2
    return s2 * (1.0 - math.sqrt(r)) ** 2, s2 * (1.0 + math.sqrt(r)) ** 2


def mp_green(z, r: float, sigma: float = 1.0):
    """Holomorphic Green function of the white Wishart ETCE, including the zero-mode pole."""
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    z = np.asarray(z, dtype=complex)
    s2 = sigma ** 2
    lo, hi = mp_edges(r, sigma)
    root = np.sqrt(z - hi) * np.sqrt(z - lo)
    g = (z - s2 * (1.0 - r) - root) / (2.0 * r * s2 * z)
    return complex(g) if g.ndim == 0 else g


def mp_density(x, r: float, sigma: float = 1.0):
    """Continuous part of the Marchenko-Pastur density; mass min(1, 1/r)."""
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    x = np.asarray(x, dtype=float)
    lo, hi = mp_edges(r, sigma)
    inside = (x > lo) & (x < hi) & (x > 0)
    safe = np.where(inside, x, 1.0)
    rho = np.where(inside, np.sqrt(np.clip((hi - safe) * (safe - lo), 0.0, None)) / (2.0 * math.pi * r * sigma ** 2 * safe), 0.0)
    return float(rho) if rho.ndim == 0 else rho


def vertical_descent(
    solve: Callable[[complex, S], S],
    x: float,
    y_target: float,
    y_start: float,
    state: S,
    accept: Optional[Callable[[complex, S], bool]] = None,
) -> S:
    """Carry a solution from x + i y_start down to x + i y_target in geometric steps.

    A failed or rejected step is retried at half the log-step, at most MAX_SPLITS
    times in a row.
    """
    y = y_start
    full = math.log(STEP_RATIO)
    log_step = full
    splits = 0
    while y > y_target:
        y_next = max(y_target, y / math.exp(log_step))
        z = complex(x, y_next)
        try:
            cand = solve(z, state)
            ok = accept is None or accept(z, cand)
        except ArithmeticError:
            ok = False
        if not ok:
            splits += 1
            if splits > MAX_SPLITS:
                raise ContinuationError(f"vertical descent stalled at y={y:.3e}", complex(x, y))
            log_step /= 2.0
            continue
        state, y, splits = cand, y_next, 0
        log_step = min(full, 2.0 * log_step)
    return state


def _etce_rhs(mC: Optional[MTransform], r: float, mA: Optional[MTransform]) -> Tuple[Callable[[complex, complex], complex], float]:
    """Fixed-point map W -> rhs(W, z) of the Case 2 master equation and a spectral scale."""
    if mA is None:
        if mC is None:
            raise ParameterError("either a C or an A prior is required")
        return (lambda w, z: mC(z / (1.0 + r * w))), mC.scale
    if mC is not None and not (mC.name == "identity" and mC.params.get("sigma2") == 1.0):
        raise ParameterError("the ETCE solver takes a non-trivial prior on one side only")
    return (lambda w, z: mA(z / (r * (1.0 + w))) / r), mA.scale


def _physical(z: complex, w: complex) -> bool:
    g = (w + 1.0) / z
    return bool(np.isfinite(g)) and g.imag <= PHYSICAL_TOL * (1.0 + abs(g))


def case2_etce_solve(mC: Optional[MTransform], r: float, z: complex, mA: Optional[MTransform] = None) -> complex:
    """Physical M(z) of the ETCE for true covariance C (or temporal prior A).

    Args:
        mC: M-transform of C, or None when C = I.
        r: rectangularity ratio N/T.
        z: point off the real axis.
        mA: M-transform of A for C = I.

    Returns:
        M = zG - 1 on the branch continued from M ~ m1/z at large |z|.
    """
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    z = complex(z)
    if z.imag == 0:
        raise ParameterError("z must be off the real axis; use x + i epsilon")
    if z.imag < 0:
        return case2_etce_solve(mC, r, z.conjugate(), mA).conjugate()
    rhs, scale = _etce_rhs(mC, r, mA)
    y0 = START_FACTOR * (scale * (1.0 + r) + abs(z.real))
    if z.imag >= y0:
        y0 = 2.0 * z.imag
    z0 = complex(z.real, y0)

    def solve(zz: complex, w: complex) -> complex:
        return complex_newton(lambda v: v - rhs(v, zz), w)

    w0 = solve(z0, rhs(0j, z0))
    return vertical_descent(solve, z.real, z.imag, y0, w0, _physical)


def etce_density(
    mC: Optional[MTransform],
    r: float,
    x,
    mA: Optional[MTransform] = None,
    epsilon: float = DEFAULT_EPSILON,
) -> np.ndarray:
    """rho(x) = -Im G(x + i epsilon) / pi from the continued solution, clamped at 0."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    for i, xv in enumerate(xs):
        z = complex(xv, epsilon)
        w = case2_etce_solve(mC, r, z, mA)
        out[i] = -((w + 1.0) / z).imag / math.pi
    negative = float(out.min()) if out.size else 0.0
    if negative < 0:
        logger.debug("etce_density clamped min=%.3e", negative)
    return np.clip(out, 0.0, None)


def tm2a_etce_polynomial(z: complex, variances: Sequence[float], weights: Sequence[float], r: float) -> Polynomial:
    """Degree K+1 polynomial in M whose physical root is the sector-model ETCE solution.

    M prod_k (z - s_k (1 + rM)) - sum_k p_k s_k (1 + rM) prod_{j != k} (z - s_j (1 + rM)).
    """
    v = np.asarray(variances, dtype=float)
    p = np.asarray(weights, dtype=float)
    lin = [np.array([z - s, -s * r], dtype=complex) for s in v]
    full = np.array([1.0 + 0j])
    for f in lin:
        full = P.polymul(full, f)
    out = P.polymul(np.array([0.0, 1.0], dtype=complex), full)
    for k, (s, pk) in enumerate(zip(v, p)):
        term = np.array([pk * s, pk * s * r], dtype=complex)
        for j, f in enumerate(lin):
            if j != k:
                term = P.polymul(term, f)
        out = P.polysub(out, term)
    return Polynomial.from_coeffs(out)


def _tm4a_residual(z: complex, variances: np.ndarray, weights: np.ndarray, chi: float, r: float):
    def f(v: np.ndarray) -> np.ndarray:
        w = complex(v[0], v[1])
        t = complex(v[2], v[3])
        a = r * chi * w + t
        e1 = w - np.sum(weights * variances * a / (z - variances * a))
        e2 = t * t - 1.0 - (chi * chi - 1.0) * r * r * w * w
        return np.array([e1.real, e1.imag, e2.real, e2.imag])

    return f


def tm4a_etce_solve(variances: Sequence[float], weights: Sequence[float], tau: float, r: float, z: complex) -> Tuple[complex, complex]:
    """(M, s) of the ETCE for sectors with a unit exponential temporal kernel.

    The auxiliary unknown is carried as t = r M s; the branch t -> 1 at large |z|.
    """
    v = np.asarray(variances, dtype=float)
    p = np.asarray(weights, dtype=float)
    _, _, chi = exponential_kernel_params(1.0, tau)
    z = complex(z)
    if z.imag < 0:
        w, s = tm4a_etce_solve(variances, weights, tau, r, z.conjugate())
        return w.conjugate(), s.conjugate()
    m1 = float(np.sum(p * v))
    scale = math.sqrt(float(np.sum(p * v * v)) * chi)
    y0 = START_FACTOR * (scale * (1.0 + r) + abs(z.real))
    z0 = complex(z.real, max(y0, 2.0 * z.imag))

    def solve(zz: complex, state: np.ndarray) -> np.ndarray:
        return solve_real_system(_tm4a_residual(zz, v, p, chi, r), state, tol=1e-12)

    def accept(zz: complex, state: np.ndarray) -> bool:
        return _physical(zz, complex(state[0], state[1]))

    w0 = m1 / z0
    state = solve(z0, np.array([w0.real, w0.imag, 1.0, 0.0]))
    state = vertical_descent(solve, z.real, z.imag, z0.imag, state, accept)
    w = complex(state[0], state[1])
    t = complex(state[2], state[3])
    s = t / (r * w) if w != 0 else complex("nan")
    return w, s


def tm4a_etce_density(x, variances: Sequence[float], weights: Sequence[float], tau: float, r: float, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    for i, xv in enumerate(xs):
        z = complex(xv, epsilon)
        w, _ = tm4a_etce_solve(variances, weights, tau, r, z)
        out[i] = -((w + 1.0) / z).imag / math.pi
    return np.clip(out, 0.0, None)
