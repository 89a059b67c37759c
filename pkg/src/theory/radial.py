"""Radial master equation of the TLCE for rotationally symmetric models.

Inside the mean spectral domain the density depends on R = |z| only. The
master equation reduces to one complex equation for two real unknowns, the
radial M-transform M(R) and an auxiliary m:

    W = M + i m,   W = rhs(W, i R s(M)),   s(M) = sqrt(-(1 + 1/(r M))),

where rhs is the ETCE fixed-point map of the prior. Equivalently Re W_ETCE(i R s(M)) = M,
which is how solutions are seeded: the ETCE is continued down the imaginary axis
and M is bracketed. Sweeps over radii continue (M, m) by Newton from the previous
radius and fall back to the seeding route when Newton fails.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.errors import ContinuationError, NoBracketError, NumericalError, ParameterError
from src.numerics.solvers import bracket_root, complex_newton, solve_real_system
from src.spectra.density import DensityCurve
from src.theory.hermitian import START_FACTOR, _physical, case2_etce_solve, vertical_descent
from src.theory.types import MTransform

logger = logging.getLogger(__name__)

RADIAL_GRID = 200
ROUTE_POINTS = 80
DIFF_STEP = 1e-4
MASS_TAIL = 1e-4
MONOTONE_TOL = 1e-10
GRADED_START = 1e-4


class RadialSolution(NamedTuple):
    radii: np.ndarray
    M: np.ndarray
    m: np.ndarray


@dataclass(frozen=True)
class RadialProblem:
    """One prior, one ratio r: the data every radial solve needs."""

    name: str
    rhs: Callable[[complex, complex], complex]
    r: float
    scale: float
    r_ext: float
    r_int: float

    @property
    def m_lo(self) -> float:
        return -min(1.0, 1.0 / self.r)

    def s(self, M: float) -> float:
        val = -(1.0 + 1.0 / (self.r * M))
        return math.sqrt(val) if val >= 0 else math.nan

    def residual(self, R: float) -> Callable[[np.ndarray], np.ndarray]:
        def f(v: np.ndarray) -> np.ndarray:
            M, m = float(v[0]), float(v[1])
            if not self.m_lo < M < 0:
                return np.array([math.nan, math.nan])
            w = complex(M, m)
            d = w - self.rhs(w, 1j * R * self.s(M))
            return np.array([d.real, d.imag])

        return f

    def etce_on_axis(self, y: float, y_from: float, w_from: complex) -> complex:
        """ETCE W at z = i y, continued from a known value at i y_from (y <= y_from)."""

        def solve(z: complex, w: complex) -> complex:
            return complex_newton(lambda v: v - self.rhs(v, z), w)

        if y >= y_from:
            return solve(1j * y, w_from)
        return vertical_descent(solve, 0.0, y, y_from, w_from, _physical)


def _start_on_axis(p: RadialProblem, y: float) -> Tuple[float, complex]:
    y_top = max(y, START_FACTOR * p.scale * (1.0 + p.r))
    z0 = 1j * y_top
    w0 = complex_newton(lambda v: v - p.rhs(v, z0), p.rhs(0j, z0))
    return y_top, w0


def _tail_newton(p: RadialProblem, R: float, M_last: float, w_last: complex) -> Tuple[float, float]:
    """(M, m) beyond the last point the imaginary-axis continuation reached.

    Near M = -1/r the axis point i R s(M) approaches the zero-mode pole of the ETCE
    for r > 1 and the continuation stalls; the radial residual takes over from there.
    """
    for frac in (1.0, 0.5, 0.1):
        seed = [p.m_lo + frac * (M_last - p.m_lo), frac * w_last.imag]
        try:
            x = solve_real_system(p.residual(R), seed)
        except NumericalError:
            continue
        if p.m_lo < x[0] <= M_last + MONOTONE_TOL:
            return float(x[0]), float(x[1])
    raise ContinuationError(f"{p.name} at R={R:.6g}: no root below M={M_last:.6g}", complex(M_last, w_last.imag))


def _etce_route(p: RadialProblem, R: float) -> Tuple[float, float]:
    """(M, m) at radius R from the ETCE on the imaginary axis."""
    if R <= 0:
        return p.m_lo, 0.0
    theta_max = math.asin(math.sqrt(p.r)) if p.r < 1 else 0.5 * math.pi
    frac = (np.arange(1, ROUTE_POINTS + 1) / ROUTE_POINTS) ** 2
    ms = -np.sin(theta_max * (1.0 - 1e-6) * frac) ** 2 / p.r
    ys = np.array([R * p.s(M) for M in ms])
    y_cur, w = _start_on_axis(p, float(ys[0]))
    ws = []
    for y in ys:
        try:
            w = p.etce_on_axis(float(y), y_cur, w)
        except ContinuationError as exc:
            logger.debug("radial route solver=%s R=%.6g stopped at M=%.6g: %s", p.name, R, float(ms[len(ws)]), exc)
            break
        y_cur = float(y)
        ws.append(w)
    if not ws:
        raise ContinuationError(f"{p.name} at R={R:.6g}: no point of the axis route converged", complex(0.0, float(ys[0])))
    truncated = len(ws) < ms.size
    ms, ys = ms[: len(ws)], ys[: len(ws)]
    g = ms - np.array([v.real for v in ws])
    if g[0] <= 0:
        return 0.0, 0.0
    idx = np.flatnonzero((g[:-1] > 0) & (g[1:] <= 0))
    if idx.size == 0:
        return _tail_newton(p, R, float(ms[-1]), ws[-1]) if truncated else (p.m_lo, 0.0)
    j = int(idx[0])

    def gfun(M: float) -> float:
        return M - p.etce_on_axis(R * p.s(M), float(ys[j]), ws[j]).real

    M_star = bracket_root(gfun, float(ms[j + 1]), float(ms[j]))
    w_star = p.etce_on_axis(R * p.s(M_star), float(ys[j]), ws[j])
    try:
        x = solve_real_system(p.residual(R), [M_star, w_star.imag])
        if p.m_lo < x[0] < 0:
            return float(x[0]), float(x[1])
    except NumericalError:
        pass
    return M_star, w_star.imag


def solve_at(p: RadialProblem, R: float, clamp: bool = True) -> Tuple[float, float]:
    """(M, m) at a single radius; outside the domain M is 0 (beyond r_ext) or M_lo (hole)."""
    if clamp and R >= p.r_ext:
        return 0.0, 0.0
    if clamp and R <= p.r_int:
        return p.m_lo, 0.0
    return _etce_route(p, R)


def radial_sweep(p: RadialProblem, radii: np.ndarray) -> RadialSolution:
    """M(R), m(R) on a radius grid by continuation in increasing R.

    Raises:
        ContinuationError: when neither Newton from the previous radius nor the
            seeding route gives a solution that keeps M nondecreasing.
    """
    radii = np.asarray(radii, dtype=float)
    M = np.empty(radii.size)
    m = np.empty(radii.size)
    prev: Optional[np.ndarray] = None
    prev_M = p.m_lo
    for i in np.argsort(radii):
        R = float(radii[i])
        if R >= p.r_ext or R <= p.r_int:
            sol = np.array(solve_at(p, R))
        else:
            sol = None
            if prev is not None and p.m_lo < prev[0] < 0:
                try:
                    cand = solve_real_system(p.residual(R), prev)
                    if p.m_lo < cand[0] < 0 and cand[0] >= prev_M - MONOTONE_TOL:
                        sol = cand
                except NumericalError:
                    sol = None
            if sol is None:
                try:
                    sol = np.array(_etce_route(p, R))
                except NumericalError as exc:
                    raise ContinuationError(f"{p.name} at R={R:.6g}: {exc}", prev_M) from exc
                if sol[0] < prev_M - MONOTONE_TOL:
                    raise ContinuationError(f"{p.name} M decreased at R={R:.6g}", prev_M)
        M[i], m[i] = sol
        prev_M = float(sol[0])
        prev = sol if p.m_lo < sol[0] < 0 else None
    logger.debug("radial_sweep solver=%s r=%.4g points=%d", p.name, p.r, radii.size)
    return RadialSolution(radii, M, m)


def truncation_radius(p: RadialProblem) -> float:
    """Radius enclosing mass 1 - 1e-4 of the continuous part; r_ext when finite."""
    if math.isfinite(p.r_ext):
        return p.r_ext
    target = MASS_TAIL * p.m_lo
    lo = max(p.r_int, 1e-3 * p.scale) * 1.0001
    hi = p.scale * math.sqrt(p.r * (1.0 + p.r)) + lo
    for _ in range(80):
        if solve_at(p, hi)[0] >= target:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NoBracketError(lo, hi, math.nan, math.nan)

    def f(log_r: float) -> float:
        return solve_at(p, math.exp(log_r))[0] - target

    return float(math.exp(brentq(f, math.log(lo), math.log(hi), xtol=1e-8)))


def _derivative(p: RadialProblem, R: float, seed: np.ndarray, h: float) -> float:
    def at(x: float) -> float:
        if x >= p.r_ext:
            return 0.0
        if x <= p.r_int:
            return p.m_lo
        try:
            return float(solve_real_system(p.residual(x), seed)[0])
        except NumericalError:
            return solve_at(p, x)[0]

    d1 = (at(R + h) - at(R - h)) / (2.0 * h)
    d2 = (at(R + 0.5 * h) - at(R - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


def radial_density(p: RadialProblem, sol: RadialSolution, r_hi: Optional[float] = None) -> np.ndarray:
    """rho_rad = dM/dR by central differences with one Richardson step."""
    r_hi = r_hi if r_hi is not None else truncation_radius(p)
    h0 = DIFF_STEP * r_hi
    out = np.zeros(sol.radii.size)
    for i, R in enumerate(sol.radii):
        if not p.r_int < R < p.r_ext:
            continue
        h = min(h0, 0.5 * (R - p.r_int), 0.5 * (p.r_ext - R))
        if h <= 0:
            continue
        seed = np.array([sol.M[i], sol.m[i]])
        out[i] = max(0.0, _derivative(p, float(R), seed, h))
    return out


def radial_edges(p: RadialProblem, r_hi: float, nbins: int) -> np.ndarray:
    """Uniform bins on [r_int, r_ext]; geometric from r_int when the domain is unbounded."""
    if math.isfinite(p.r_ext):
        return np.linspace(p.r_int, r_hi, nbins + 1)
    span = r_hi - p.r_int
    return p.r_int + np.concatenate([[0.0], np.geomspace(GRADED_START * span, span, nbins)])


def radial_density_curve(p: RadialProblem, nbins: int = RADIAL_GRID) -> DensityCurve:
    """Theoretical radial density on nbins midpoints of [r_int, r_ext] (or the truncation radius)."""
    r_hi = truncation_radius(p)
    edges = radial_edges(p, r_hi, nbins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    sol = radial_sweep(p, centers)
    rho = radial_density(p, sol, r_hi)
    meta = {"solver": p.name, "r": p.r, "r_ext": p.r_ext, "r_int": p.r_int, "r_trunc": r_hi}
    logger.info("radial_density solver=%s r=%.4g r_ext=%.6g r_int=%.6g", p.name, p.r, p.r_ext, p.r_int)
    return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata=meta)


def borderline_radii_generalC(mC: MTransform, r: float) -> Tuple[float, float]:
    """(r_ext, r_int) from the moments of C and the inverse of M_C at -1/r.

    r_ext^2 = r^2 m1^2 + r m2; for r > 1, r_int^2 = r z^3 M_C'(z) at M_C(z) = -1/r.
    """
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    ext2 = r * r * mC.m1 ** 2 + r * mC.m2
    r_ext = math.sqrt(ext2) if math.isfinite(ext2) else math.inf
    if r <= 1:
        return r_ext, 0.0
    z = mC.inverse_negative(-1.0 / r)
    int2 = r * z ** 3 * mC.derivative(z).real
    return r_ext, math.sqrt(max(int2, 0.0))


def tm2a_internal_radius(variances, weights, r: float) -> float:
    """Sector model: f > 0 with sum p s/(f + s) = 1/r, r_int^2 = r f^3 sum p s/(f + s)^2."""
    if r <= 1:
        return 0.0
    v = np.asarray(variances, dtype=float)
    p = np.asarray(weights, dtype=float)
    g = lambda f: float(np.sum(p * v / (f + v))) - 1.0 / r
    hi = float(v.max()) * r
    f = brentq(g, 1e-300, hi, xtol=1e-15, rtol=1e-14)
    return math.sqrt(r * f ** 3 * float(np.sum(p * v / (f + v) ** 2)))


def tm2b_internal_radius(lambda_min: float, r: float) -> float:
    """Power-law variances (slope 2): internal radius from the nontrivial root f1 of F(f)."""
    if r <= 1:
        return 0.0
    a = 1.0 - lambda_min
    f0 = 1.0 - 2.0 * lambda_min
    disc = math.sqrt((r - 1.0) * (r - 1.0 + 8.0 * lambda_min * (1.0 - 2.0 * lambda_min)))
    f_plus = 0.25 * (r - 1.0 + disc)
    f_minus = 0.25 * (r - 1.0 - disc)

    def F(f: float) -> float:
        poly = -(r - 1.0) * f0 ** 2 - (2.0 + r - 4.0 * lambda_min) * f + f * f
        return 2.0 * a * a * math.log((f + lambda_min) / a) + (f - f0) / (r * f) * poly

    if f0 > f_plus:
        lo, hi = 1e-12 * f_plus, f_plus
    else:
        lo, hi = f_plus, 2.0 * max(f_plus, 1.0)
        while np.sign(F(hi)) == np.sign(F(lo)) and hi < 1e12:
            hi *= 2.0
    f1 = bracket_root(F, lo, hi, tol=1e-15)
    val = 2.0 * f1 ** 2 * (f1 - f_plus) * (f1 - f_minus) / ((f1 - f0) * (f1 + lambda_min))
    return math.sqrt(val)


def diag_a_radii(mA: MTransform, r: float) -> Tuple[float, float]:
    """Radii for C = I with a diagonal temporal prior A.

    r_ext^2 = r m1^2 + r^2 m2; for r > 1, r_int^2 = (r - 1)^3 / (m_{-1}^2 + (r - 1) m_{-2}).
    """
    if r <= 0:
        raise ParameterError(f"r must be positive, got {r}")
    ext2 = r * mA.m1 ** 2 + r * r * mA.m2
    r_ext = math.sqrt(ext2) if math.isfinite(ext2) else math.inf
    if r <= 1:
        return r_ext, 0.0
    if mA.m_neg1 is None or mA.m_neg2 is None:
        raise ParameterError(f"{mA.name} prior has no negative moments for the internal radius")
    return r_ext, math.sqrt((r - 1.0) ** 3 / (mA.m_neg1 ** 2 + (r - 1.0) * mA.m_neg2))


def general_c_problem(mC: MTransform, r: float, radii: Optional[Tuple[float, float]] = None) -> RadialProblem:
    r_ext, r_int = radii if radii is not None else borderline_radii_generalC(mC, r)
    return RadialProblem(f"generalC:{mC.name}", lambda w, z: mC(z / (1.0 + r * w)), r, mC.scale, r_ext, r_int)


def diag_a_problem(mA: MTransform, r: float) -> RadialProblem:
    r_ext, r_int = diag_a_radii(mA, r)
    return RadialProblem(f"diagA:{mA.name}", lambda w, z: mA(z / (r * (1.0 + w))) / r, r, mA.scale, r_ext, r_int)


def rot_master_solve_generalC(mC: MTransform, r: float, R: float, clamp: bool = True) -> Tuple[float, float]:
    """(M, m) of the radial master equation for a general C prior and A = I."""
    return solve_at(general_c_problem(mC, r), R, clamp)


def rot_master_solve_diagA(mA: MTransform, r: float, R: float, clamp: bool = True) -> Tuple[float, float]:
    """(M, m) for C = I and a diagonal temporal prior A."""
    return solve_at(diag_a_problem(mA, r), R, clamp)


def wrong_law_radius(mC2: MTransform, r: float) -> float:
    """External radius of the rejected multiplication law: sqrt(r (1 + r) <lambda^2>)."""
    return math.sqrt(r * (1.0 + r) * mC2.m1)


def wrong_multiplication_law_solve(mC2: MTransform, r: float, R: float) -> float:
    """M of the rejected law M = M_{C^2}(R^2 (1 + r + rM) / (rM (1 + r + 2rM)^2)).

    Args:
        mC2: M-transform of C^2.
        r: rectangularity ratio.
        R: radius.

    Returns:
        The root in (M_lo, 0) nearest 0; 0 beyond the external radius, M_lo in the hole.
    """
    m_lo = -min(1.0, 1.0 / r)
    if R <= 0:
        return m_lo

    def g(M: float) -> float:
        w = R * R * (1.0 + r + r * M) / (r * M * (1.0 + r + 2.0 * r * M) ** 2)
        return M - mC2(w).real

    frac = (np.arange(1, ROUTE_POINTS * 4 + 1) / (ROUTE_POINTS * 4)) ** 2
    ms = m_lo * (1.0 - 1e-9) * frac
    vals = np.array([g(M) for M in ms])
    if vals[0] <= 0:
        return 0.0
    idx = np.flatnonzero((vals[:-1] > 0) & (vals[1:] <= 0))
    if idx.size == 0:
        return m_lo
    j = int(idx[0])
    return bracket_root(g, float(ms[j + 1]), float(ms[j]))


def wrong_law_density_curve(mC2: MTransform, r: float, nbins: int = RADIAL_GRID) -> DensityCurve:
    r_ext = wrong_law_radius(mC2, r)
    edges = np.linspace(0.0, r_ext, nbins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    h = DIFF_STEP * r_ext
    rho = np.empty(nbins)
    for i, R in enumerate(centers):
        hh = min(h, 0.5 * R, 0.5 * (r_ext - R))
        d1 = (wrong_multiplication_law_solve(mC2, r, R + hh) - wrong_multiplication_law_solve(mC2, r, R - hh)) / (2 * hh)
        d2 = (wrong_multiplication_law_solve(mC2, r, R + hh / 2) - wrong_multiplication_law_solve(mC2, r, R - hh / 2)) / hh
        rho[i] = max(0.0, (4.0 * d2 - d1) / 3.0)
    meta = {"solver": "wrong_law", "r": r, "r_ext": r_ext}
    return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata=meta)


def ntransform_crosscheck(mC: MTransform, r: float, R: float) -> float:
    """|W from the radial Newton route - W_ETCE(i R s(M))| with an independent ETCE continuation."""
    p = general_c_problem(mC, r)
    M, m = solve_at(p, R)
    if M == 0.0 or M == p.m_lo:
        return 0.0
    w_etce = case2_etce_solve(mC, r, 1j * R * p.s(M))
    return abs(complex(M, m) - w_etce)
