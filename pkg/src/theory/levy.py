"""Free Levy returns with C = I and A = I: TLCE radial system and ETCE equation.

The TLCE unknowns are the radial M, the auxiliary m and, for skewed laws, a complex
delta. Solutions are anchored on the Gaussian cubic at alpha = 2, carried to the
target stability index by homotopy, then to the target skewness and along R.
Powers are principal; the continuation keeps every base off the negative axis.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.covariance.models import validate_levy
from src.errors import ContinuationError, NumericalError, UnsupportedTheoryError
from src.numerics.solvers import complex_newton, solve_real_system
from src.spectra.density import DensityCurve
from src.theory.hermitian import START_FACTOR, _physical, vertical_descent
from src.theory.tm1 import tm1_tlce_density_curve, tm1_tlce_solution

logger = logging.getLogger(__name__)

ALPHA_STEP = 0.02
BETA_STEP = 0.1
LOG_R_STEP = 0.05
MIN_FRACTION = 1.0 / 256.0
MASS_TAIL = 1e-4
DIFF_STEP = 1e-4

Residual = Callable[[np.ndarray], np.ndarray]


def _homotopy(make_f: Callable[[float], Residual], start: float, stop: float, state: np.ndarray, step: float) -> np.ndarray:
    """Carry a root of make_f(t) from t = start to t = stop with adaptive steps."""
    t = start
    h = step
    while t != stop:
        nxt = stop if abs(stop - t) <= h else t + math.copysign(h, stop - t)
        try:
            state = solve_real_system(make_f(nxt), state)
            t = nxt
            h = min(step, 1.5 * h)
        except NumericalError:
            h *= 0.5
            if h < step * MIN_FRACTION:
                raise ContinuationError(f"homotopy stalled at t={t:.6g}", complex(state[0], state[1]))
    return state


class FreeLevyTlce:
    """Radial TLCE system for free Levy returns with stability alpha, skewness beta, range gamma."""

    def __init__(self, alpha: float, beta: float, gamma_range: float, r: float):
        validate_levy(alpha, beta, gamma_range)
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma_range
        self.r = r
        self.m_lo = -min(1.0, 1.0 / r)
        self.r0 = 0.5 * gamma_range * math.sqrt(r * (1.0 + r))
        self._anchor: Optional[np.ndarray] = None

    @property
    def skewed(self) -> bool:
        return self.beta != 0.0

    def _s(self, M: float) -> float:
        return math.sqrt(-(1.0 + 1.0 / (self.r * M)))

    def zero_skew(self, alpha: float, R: float) -> Residual:
        r, g2 = self.r, self.gamma ** 2

        def f(v: np.ndarray) -> np.ndarray:
            M, m = float(v[0]), float(v[1])
            if not self.m_lo < M < 0:
                return np.array([math.nan, math.nan])
            w = complex(M, m)
            zz = (1.0 + r * w) * (1.0 + w) / self._s(M)
            d = zz ** alpha * np.exp(0.5j * math.pi * alpha) * r ** (alpha - 2.0) - R ** alpha / g2 * w * w
            return np.array([d.real, d.imag])

        return f

    def full(self, alpha: float, beta: float, R: float) -> Residual:
        r, g2 = self.r, self.gamma ** 2
        phi = np.exp(1j * math.pi * (alpha if alpha < 1 else alpha - 2.0) * beta)

        def f(v: np.ndarray) -> np.ndarray:
            M, m = float(v[0]), float(v[1])
            if not self.m_lo < M < 0:
                return np.full(4, math.nan)
            w = complex(M, m)
            delta = complex(v[2], v[3])
            a = 1.0 + r * w
            b = r * w
            e1 = phi * (a + delta) ** alpha * (b - delta) - (a - delta) ** alpha * (b + delta)
            base = (a * a - delta * delta) * (1.0 + w) / (a * self._s(M))
            e2 = base ** alpha * np.exp(0.5j * math.pi * alpha) * r ** alpha / (b * b - delta * delta) - R ** alpha / g2
            return np.array([e1.real, e1.imag, e2.real, e2.imag])

        return f

    def residual(self, R: float) -> Residual:
        return self.full(self.alpha, self.beta, R) if self.skewed else self.zero_skew(self.alpha, R)

    def anchor(self) -> np.ndarray:
        """Solution at R0 for the target parameters, from the Gaussian cubic at R0 / gamma."""
        if self._anchor is not None:
            return self._anchor
        M, m = tm1_tlce_solution(self.r0 / self.gamma, self.r)
        state = solve_real_system(self.zero_skew(2.0, self.r0), [M, m])
        state = _homotopy(lambda a: self.zero_skew(a, self.r0), 2.0, self.alpha, state, ALPHA_STEP)
        if self.skewed:
            state = np.concatenate([state, [0.0, 0.0]])
            state = _homotopy(lambda b: self.full(self.alpha, b, self.r0), 0.0, self.beta, state, BETA_STEP)
        self._anchor = state
        logger.debug("levy_anchor alpha=%.4g beta=%.4g r=%.4g M=%.6g", self.alpha, self.beta, self.r, state[0])
        return state

    def solve(self, R: float, start: Optional[Tuple[float, np.ndarray]] = None) -> np.ndarray:
        """State at radius R, continued in log R from the anchor (or from `start` = (R_from, state))."""
        if self.alpha == 2.0 and R >= self.gamma * math.sqrt(self.r * (1.0 + self.r)):
            return np.zeros(4 if self.skewed else 2)
        R_from, state = start if start is not None else (self.r0, self.anchor())
        return _homotopy(lambda lr: self.residual(math.exp(lr)), math.log(R_from), math.log(R), state, LOG_R_STEP)

    def truncation_radius(self) -> float:
        target = MASS_TAIL * self.m_lo
        R, state = self.r0, self.anchor()
        for _ in range(200):
            nxt = 1.25 * R
            new = self.solve(nxt, (R, state))
            if new[0] >= target:
                seed = state

                def f(x: float) -> float:
                    return float(solve_real_system(self.residual(x), seed)[0]) - target

                return float(brentq(f, R, nxt, xtol=1e-10 * nxt))
            R, state = nxt, new
        raise ContinuationError("mass tail not reached", complex(state[0], state[1]))

    def sweep(self, radii: np.ndarray) -> np.ndarray:
        """States at the given radii, chained outward and inward from the anchor radius."""
        radii = np.asarray(radii, dtype=float)
        width = 4 if self.skewed else 2
        out = np.empty((radii.size, width))
        order = np.argsort(radii)
        up = [i for i in order if radii[i] >= self.r0]
        down = [i for i in order[::-1] if radii[i] < self.r0]
        for chain in (up, down):
            R_prev, state = self.r0, self.anchor()
            for i in chain:
                state = self.solve(float(radii[i]), (R_prev, state))
                out[i] = state
                R_prev = float(radii[i])
        return out

    def density_curve(self, nbins: int = 200) -> DensityCurve:
        if self.alpha == 2.0:
            curve = tm1_tlce_density_curve(self.r, math.sqrt(self.gamma), nbins)
            curve.metadata.update({"solver": "free_levy", "alpha": 2.0, "beta": self.beta, "gamma": self.gamma})
            return curve
        r_hi = self.truncation_radius()
        edges = np.linspace(0.0, r_hi, nbins + 1)
        centers = 0.5 * (edges[:-1] + edges[1:])
        states = self.sweep(centers)
        h0 = DIFF_STEP * r_hi
        rho = np.empty(nbins)
        for i, R in enumerate(centers):
            h = min(h0, 0.5 * R)
            seed = states[i]

            def at(x: float) -> float:
                return float(solve_real_system(self.residual(x), seed)[0])

            d1 = (at(R + h) - at(R - h)) / (2.0 * h)
            d2 = (at(R + 0.5 * h) - at(R - 0.5 * h)) / h
            rho[i] = max(0.0, (4.0 * d2 - d1) / 3.0)
        meta = {"solver": "free_levy", "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "r": self.r, "r_trunc": r_hi}
        logger.info("free_levy alpha=%.4g beta=%.4g r=%.4g r_trunc=%.6g", self.alpha, self.beta, self.r, r_hi)
        return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata=meta)


def free_levy_tlce_solve(alpha: float, beta: float, gamma_range: float, r: float, R: float) -> Tuple[float, float, complex]:
    """(M, m, delta) of the free Levy TLCE at radius R; delta = 0 for zero skew."""
    system = FreeLevyTlce(alpha, beta, gamma_range, r)
    state = system.solve(R)
    delta = complex(state[2], state[3]) if system.skewed else 0j
    return float(state[0]), float(state[1]), delta


def _etce_residual(alpha: float, gamma_range: float, r: float, z: complex) -> Callable[[complex], complex]:
    phase = np.exp(1j * math.pi * alpha)
    g2 = gamma_range ** 2

    def f(M: complex) -> complex:
        rm = r * M
        return phase * rm ** (alpha - 2.0) * (1.0 + rm) ** alpha * ((1.0 + M) / M) ** alpha * g2 - z ** alpha

    return f


def free_levy_etce_solve(alpha: float, beta: float, gamma_range: float, r: float, z: complex) -> complex:
    """M(z) of the free Levy ETCE, zero skew, from the MP branch at large |z| via alpha homotopy."""
    validate_levy(alpha, beta, gamma_range)
    if beta != 0:
        raise UnsupportedTheoryError("theory out of scope: the skewed free Levy ETCE remains to be developed")
    z = complex(z)
    if z.imag < 0:
        return free_levy_etce_solve(alpha, beta, gamma_range, r, z.conjugate()).conjugate()
    y0 = max(START_FACTOR * (gamma_range * (1.0 + r) + abs(z.real)), 2.0 * z.imag)
    z0 = complex(z.real, y0)
    M = gamma_range * 1.0 / z0
    M = complex_newton(_etce_residual(2.0, gamma_range, r, z0), M)
    n = max(1, int(math.ceil(abs(2.0 - alpha) / ALPHA_STEP)))
    for a in np.linspace(2.0, alpha, n + 1)[1:]:
        M = complex_newton(_etce_residual(float(a), gamma_range, r, z0), M)

    def solve(zz: complex, w: complex) -> complex:
        return complex_newton(_etce_residual(alpha, gamma_range, r, zz), w)

    return vertical_descent(solve, z.real, z.imag, y0, M, _physical)
