"""Exponentially autocorrelated returns: C = I, A(b - a) = sigma^2 exp(-|b - a| / tau).

ETCE: a quartic in G with edges from a sextic. TLCE: the master pair
F1(G, h) = 0, F2(G, h) = z, with contour integrals over the unit circle
evaluated by residues of 1 / W(u), W of degree 2(t + 1).
"""
from __future__ import annotations

import logging
import math
from typing import Dict, List, Tuple

import numpy as np
from scipy.optimize import brentq

from src.covariance.kernels import exponential_kernel_params
from src.errors import EdgeAmbiguityError, ParameterError, RootClassificationError
from src.numerics.contour import classify_roots, simple_residue_sums
from src.numerics.polynomial import from_descending, poly_roots, poly_roots_batch, real_roots
from src.spectra.density import DensityCurve, curve_from_samples
from src.theory.types import Borderline

logger = logging.getLogger(__name__)

ETCE_EPSILON = 1e-7
TRACK_RATIO = 1.5
HERGLOTZ_TOL = 1e-9
BRANCH_TOL = 1e-5
EXTERNAL_POINTS = 120
Y_SCAN_POINTS = 400


def critical_ratio(tau: float) -> float:
    """r_c = 1 / (1 + exp(-2 / tau)); a hole opens in the t = 1 domain for r_c < r < 1."""
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    return 1.0 / (1.0 + math.exp(-2.0 / tau))


def _quartic_coeffs(z: np.ndarray, r: float, chi: float) -> np.ndarray:
    """Ascending coefficients in G (sigma = 1) of the ETCE quartic, one row per z."""
    ones = np.ones_like(z)
    return np.stack([
        ones,
        -2.0 * (z + r * chi),
        z * z + 4.0 * r * chi * z + r * r - 1.0,
        -2.0 * r * z * (chi * z + r),
        r * r * z * z,
    ], axis=1)


def _branch_residual(z: np.ndarray, roots: np.ndarray, r: float, tau: float) -> np.ndarray:
    """|w - M_A(1 / (rG)) / r| / (1 + |w|) with w = zG - 1, per quartic root (sigma = 1)."""
    th = math.tanh(0.5 / tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = z[:, None] * roots - 1.0
        x = 1.0 / (r * roots)
        m = 1.0 / (np.sqrt(x - th) * np.sqrt(x - 1.0 / th))
        res = np.abs(w - m / r) / (1.0 + np.abs(w))
    return np.where(np.isfinite(res), res, np.inf)


def tm3_etce_green(z, r: float, sigma: float, tau: float) -> np.ndarray:
    """Physical quartic root G(z), tracked from G ~ 1/z down to Im z of each point.

    Only roots with Im G <= 0 (for Im z > 0) that solve the unsquared equation
    w = M_A(z / (r(1 + w))) / r are eligible; the quartic also carries the roots
    of the other square-root branch.
    """
    _, _, chi = exponential_kernel_params(1.0, tau)
    s2 = sigma ** 2
    zs = np.atleast_1d(np.asarray(z, dtype=complex)) / s2
    y_target = np.abs(zs.imag)
    flip = zs.imag < 0
    x = zs.real
    y0 = 10.0 * (1.0 + r) * chi + float(np.max(np.abs(x), initial=0.0))
    G = None
    y = np.full(zs.size, y0)
    rows = np.arange(zs.size)
    while True:
        y = np.maximum(y_target, y)
        zz = x + 1j * y
        roots = poly_roots_batch(_quartic_coeffs(zz, r, chi))
        res = _branch_residual(zz, roots, r, tau)
        herglotz = roots.imag <= HERGLOTZ_TOL * (1.0 + np.abs(roots))
        valid = herglotz & (res <= BRANCH_TOL)
        score = res if G is None else np.abs(roots - G[:, None])
        pick = np.argmin(np.where(valid, score, np.inf), axis=1)
        stuck = ~valid.any(axis=1)
        if stuck.any():
            logger.debug("tm3_etce_green no admissible root points=%d y_min=%.3e", int(stuck.sum()), float(y[stuck].min()))
            pick = np.where(stuck, np.argmin(res + np.where(herglotz, 0.0, 1.0), axis=1), pick)
        G = roots[rows, pick]
        if np.all(y <= y_target):
            break
        y = y / TRACK_RATIO
    G = np.where(flip, np.conj(G), G)
    return G / s2


def tm3_etce_density(x, r: float, sigma: float, tau: float, epsilon: float = ETCE_EPSILON) -> np.ndarray:
    """ETCE density -Im G(x + i epsilon) / pi; zero outside the sextic edges."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    G = tm3_etce_green(xs + 1j * epsilon * sigma ** 2, r, sigma, tau)
    rho = np.clip(-G.imag / math.pi, 0.0, None)
    lo, hi = tm3_etce_edges(r, sigma, tau)
    rho[(xs < lo) | (xs > hi)] = 0.0
    return rho


def tm3_edge_sextic(r: float, chi: float):
    """Sextic in x (sigma = 1) whose real nonnegative roots are the ETCE edges."""
    c2 = chi * chi
    c4 = c2 * c2
    r2 = r * r
    return from_descending([
        c2 - 1.0,
        -6.0 * r * chi * (c2 - 1.0),
        3.0 * (1.0 - r2) - (2.0 + 9.0 * r2) * c2 + 12.0 * r2 * c4,
        2.0 * r * chi * (3.0 * (1.0 + 2.0 * r2) - (5.0 + 2.0 * r2) * c2 - 4.0 * r2 * c4),
        -3.0 * (1.0 + 7.0 * r2 + r2 * r2) + (1.0 + 26.0 * r2 - 9.0 * r2 * r2) * c2 + r2 * (1.0 + 12.0 * r2) * c4,
        -2.0 * r * chi * (3.0 * (1.0 - r2) * (2.0 + r2) + r2 * (5.0 + 3.0 * r2) * c2),
        (1.0 - r2) ** 2 * (1.0 - r2 + r2 * c2),
    ])


def tm3_etce_edges(r: float, sigma: float, tau: float) -> Tuple[float, float]:
    """(x_min, x_max): the two real nonnegative sextic roots, scaled by sigma^2.

    Raises:
        EdgeAmbiguityError: when the sextic does not have exactly two admissible roots.
    """
    _, _, chi = exponential_kernel_params(1.0, tau)
    roots = real_roots(tm3_edge_sextic(r, chi), imag_tol=1e-7)
    admissible = roots[roots >= -1e-12]
    if admissible.size != 2:
        raise EdgeAmbiguityError([float(v) for v in roots])
    lo, hi = np.clip(admissible, 0.0, None) * sigma ** 2
    return float(lo), float(hi)


def tm3_etce_curve(r: float, sigma: float, tau: float, points: int = 400) -> DensityCurve:
    lo, hi = tm3_etce_edges(r, sigma, tau)
    xs = np.linspace(lo, hi, points)
    return curve_from_samples("real_line", xs, tm3_etce_density(xs, r, sigma, tau), solver="tm3_quartic", r=r, sigma=sigma, tau=tau, x_min=lo, x_max=hi)


def tm3_w_coeffs(G, h, r: float, a1: float, a2: float, t: int) -> np.ndarray:
    """Ascending coefficients of W(u), shape (..., 2t + 3), for arrays of G and h."""
    if t < 1:
        raise ParameterError(f"lag t must be at least 1, got {t}")
    G = np.asarray(G, dtype=complex)
    h = np.asarray(h, dtype=float)
    G, h = np.broadcast_arrays(G, h)
    out = np.zeros(G.shape + (2 * t + 3,), dtype=complex)
    gb = np.conj(G)
    out[..., 0] += r * a1 * gb
    out[..., 1] += -r * a1 * a2 * gb
    out[..., 2] += r * a1 * gb
    out[..., t - 1] += 1.0
    out[..., t] += -2.0 * a2
    out[..., t + 1] += 2.0 + a2 * a2 + r * r * a1 * a1 * (np.abs(G) ** 2 + h)
    out[..., t + 2] += -2.0 * a2
    out[..., t + 3] += 1.0
    out[..., 2 * t] += r * a1 * G
    out[..., 2 * t + 1] += -r * a1 * a2 * G
    out[..., 2 * t + 2] += r * a1 * G
    return out


def tm3_factor_roots(G, r: float, a1: float, a2: float, t: int) -> np.ndarray:
    """Roots of W at h = 0 from its two degree-(t + 1) factors, shape (..., 2t + 2)."""
    G = np.atleast_1d(np.asarray(G, dtype=complex))
    n = G.size
    f1 = np.zeros((n, t + 2), dtype=complex)
    f1[:, 0] = 1.0
    f1[:, 1] = -a2
    f1[:, 2] += 1.0
    f1[:, t + 1] += r * a1 * G.ravel()
    f2 = np.zeros((n, t + 2), dtype=complex)
    f2[:, 0] = r * a1 * np.conj(G.ravel())
    f2[:, t - 1] += 1.0
    f2[:, t] += -a2
    f2[:, t + 1] += 1.0
    return np.concatenate([poly_roots_batch(f1), poly_roots_batch(f2)], axis=1)


def _numerators(t: int, a2: float) -> Tuple[np.ndarray, np.ndarray]:
    n1 = np.zeros(t + 1, dtype=complex)
    n1[t] = 1.0
    n2 = np.zeros(2 * t + 2, dtype=complex)
    n2[2 * t - 1] = -1.0
    n2[2 * t] = a2
    n2[2 * t + 1] = -1.0
    return n1, n2


def tm3_F_from_roots(G: np.ndarray, h: np.ndarray, roots: np.ndarray, inside: np.ndarray, r: float, a1: float, a2: float, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """F1 and F2 for rows of (G, h) with given W-roots and the poles to include."""
    G = np.atleast_1d(np.asarray(G, dtype=complex))
    h = np.broadcast_to(np.asarray(h, dtype=float), G.shape)
    coeffs = tm3_w_coeffs(G, h, r, a1, a2, t)
    n1, n2 = _numerators(t, a2)
    s1 = simple_residue_sums(n1, coeffs, roots, inside)
    s2 = simple_residue_sums(n2, coeffs, roots, inside)
    f1 = (r * a1 * a1 * s1).real - 1.0 / (np.abs(G) ** 2 + h)
    return f1, a1 * s2


def tm3_tlce_F(G: complex, h_tilde: float, r: float, sigma: float, tau: float, t: int) -> Tuple[float, complex]:
    """(F1, F2) of the TLCE master pair at one point.

    h_tilde = 0 uses the factorised W. Exactly t + 1 roots must lie inside C(0, 1).

    Raises:
        RootClassificationError: when the inside count differs from t + 1.
        ContourPinchError: when a root lies on the unit circle.
    """
    if h_tilde < 0:
        raise ParameterError(f"h_tilde must be nonnegative, got {h_tilde}")
    a1, a2, _ = exponential_kernel_params(sigma, tau)
    if h_tilde == 0:
        roots = tm3_factor_roots(G, r, a1, a2, t)
    else:
        coeffs = tm3_w_coeffs(G, h_tilde, r, a1, a2, t)
        roots = poly_roots_batch(coeffs[None, :])
    inside = classify_roots(roots[0])[None, :]
    count = int(inside.sum())
    if count != t + 1:
        raise RootClassificationError(count, t + 1)
    f1, f2 = tm3_F_from_roots(np.array([G]), np.array([h_tilde]), roots, inside, r, a1, a2, t)
    return float(f1[0]), complex(f2[0])


def _t1_roots(G: np.ndarray, r: float, a1: float, a2: float) -> np.ndarray:
    """Columns u1+, u1-, u2+, u2- for t = 1."""
    G = np.atleast_1d(np.asarray(G, dtype=complex))
    root = np.sqrt(a2 * a2 / 4.0 - 1.0 - r * a1 * np.conj(G))
    u1p = a2 / 2.0 + root
    u1m = a2 / 2.0 - root
    return np.stack([u1p, u1m, 1.0 / np.conj(u1m), 1.0 / np.conj(u1p)], axis=1)


EXTERNAL_SET = np.array([False, True, False, True])
INTERNAL_SET = np.array([False, False, True, True])


def _t1_F(G: np.ndarray, pole_set: np.ndarray, r: float, a1: float, a2: float) -> Tuple[np.ndarray, np.ndarray]:
    G = np.atleast_1d(np.asarray(G, dtype=complex))
    roots = _t1_roots(G, r, a1, a2)
    inside = np.broadcast_to(pole_set, roots.shape)
    return tm3_F_from_roots(G, np.zeros(G.size), roots, inside, r, a1, a2, 1)


def _t1_set_holds(G: np.ndarray, pole_set: np.ndarray, r: float, a1: float, a2: float) -> np.ndarray:
    mod = np.abs(_t1_roots(G, r, a1, a2))
    return np.all((mod < 1.0) == pole_set, axis=1)


def _quintic(r: float, a1: float, a2: float):
    b = 4.0 - a2 * a2
    return from_descending([
        4.0 * r ** 5 * a1 ** 5,
        r * r * a1 ** 4 * (a2 * a2 + 36.0 * r * r - a2 * a2 * r * r),
        16.0 * r ** 3 * a1 ** 3 * (8.0 - a2 * a2),
        2.0 * r * r * a1 * a1 * b * (28.0 - a2 * a2),
        12.0 * r * a1 * b * b,
        b ** 3,
    ])


def tm3_crossings(r: float, sigma: float, tau: float) -> Dict[str, List[float]]:
    """Real-axis crossings of the t = 1 external borderline.

    Returns:
        X: admissible real quintic roots (G-plane); x: residue-map images; x_printed: closed-form images.
    """
    a1, a2, _ = exponential_kernel_params(sigma, tau)
    roots = real_roots(_quintic(r, a1, a2), imag_tol=1e-8)
    roots = roots[np.abs(roots) > 1e-12]
    ok = roots[_t1_set_holds(roots.astype(complex), EXTERNAL_SET, r, a1, a2)] if roots.size else roots
    if ok.size == 0:
        raise EdgeAmbiguityError([float(v) for v in roots])
    _, f2 = _t1_F(ok.astype(complex), EXTERNAL_SET, r, a1, a2)
    printed = -(4.0 - a2 * a2 + 2.0 * r * a1 * ok + r * (1.0 - r) * a1 * a1 * ok * ok) / (2.0 * r * a1 * (1.0 + r * a1 * ok) * ok * ok)
    order = np.argsort(ok)
    return {"X": ok[order].tolist(), "x": f2.real[order].tolist(), "x_printed": printed[order].tolist()}


def _u_system(G, r: float, a1: float, a2: float) -> Tuple[np.ndarray, np.ndarray]:
    """Residual of the external U-system at G = X + iY, and U itself.

    U = 2 Re sqrt(a2^2/4 - 1 - r a1 conj(G)) solves the quadratic in U^2 identically,
    so the second equation leaves one real residual, continuous in (X, Y).
    """
    G = np.asarray(G, dtype=complex)
    X, Y = G.real, G.imag
    U = 2.0 * np.sqrt(a2 * a2 / 4.0 - 1.0 - r * a1 * np.conj(G)).real
    b = 4.0 - a2 * a2 + 4.0 * r * a1 * X
    q = X * X + Y * Y
    k = r * r * a1 * a1
    res = (b + 2.0 * k * q) * U * U + r * a1 * a1 * a2 * q * U + k * (b * X * X + (b - 8.0) * Y * Y)
    return res, U


def _printed_external(X: float, Y: float, r: float, a1: float, a2: float) -> Tuple[float, complex]:
    """U-system residual and closed-form (x, y) image of an external point with Y > 0."""
    res, U = _u_system(complex(X, Y), r, a1, a2)
    res, U = float(res), float(U)
    q = X * X + Y * Y
    den = 4.0 * q * ((1.0 + r * a1 * X) ** 2 + r * r * a1 * a1 * Y * Y)
    x = ((2.0 / (r * a1) + 2.0 * X - r * a1 * q) * U * U
         + X * (4.0 + a1 * (-2.0 * (1.0 - r) + r * a2 * a2) * X - 2.0 * r * (1.0 + r) * a1 * a1 * X * X)
         + a1 * (-2.0 * (1.0 + r) + r * a2 * a2 - 2.0 * r * (1.0 + r) * a1 * X) * Y * Y) / den
    y = (-(X * X * (1.0 + r * a1 * X) + (3.0 + r * a1 * X) * Y * Y) * U * U
         + X * X * (1.0 + r * a1 * X) * (-4.0 + a2 * a2 - 4.0 * r * a1 * X)
         + (-4.0 + a2 * a2 + r * a1 * (-12.0 + a2 * a2) * X + 2.0 * r * (1.0 - 3.0 * r) * a1 * a1 * X * X) * Y * Y
         + 2.0 * r * (1.0 - r) * a1 * a1 * Y ** 4) / (den * Y)
    return abs(res), complex(x, y)


def _external_curve(r: float, a1: float, a2: float, x_lo: float, x_hi: float, points: int) -> np.ndarray:
    """External G-curve from x_hi through the upper half plane to x_lo.

    The curve encloses G = 0 (z = infinity). Along each ray from the origin the first
    zero of the U-system residual with u1-, u2- inside C(0, 1) is kept.
    """
    rho_hi = 4.0 * max(abs(x_lo), abs(x_hi))
    rhos = np.geomspace(1e-3 * min(abs(x_lo), abs(x_hi)), rho_hi, Y_SCAN_POINTS)
    out = [complex(x_hi)]
    for phi in math.pi * (np.arange(points) + 0.5) / points:
        ray = complex(math.cos(phi), math.sin(phi))
        f = _u_system(rhos * ray, r, a1, a2)[0]
        for i in np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:])):
            rho = brentq(lambda s: float(_u_system(s * ray, r, a1, a2)[0]), rhos[i], rhos[i + 1], xtol=1e-14 * rho_hi)
            G = rho * ray
            if _t1_set_holds(np.array([G]), EXTERNAL_SET, r, a1, a2)[0]:
                out.append(G)
                break
    out.append(complex(x_lo))
    return np.array(out, dtype=complex)


def _internal_curve(r: float, a1: float, a2: float, points: int) -> np.ndarray:
    q = r * (1.0 - r)
    disc = 1.0 - q * a2 * a2
    if disc < 0:
        return np.zeros(0, dtype=complex)
    x_minus = (-1.0 + 2.0 * r - math.sqrt(disc)) / (q * a1)
    x_plus = (-1.0 + 2.0 * r + math.sqrt(disc)) / (q * a1)
    k = np.arange(points)
    mid, half = 0.5 * (x_minus + x_plus), 0.5 * (x_plus - x_minus)
    out = []
    for X in mid - half * np.cos(math.pi * (k + 0.5) / points):
        b = a2 * a2 + 2.0 * (1.0 - 2.0 * r) * a1 * X + 2.0 * q * a1 * a1 * X * X
        c = X * X * (-4.0 + a2 * a2 + 2.0 * (1.0 - 2.0 * r) * a1 * X + q * a1 * a1 * X * X)
        a = q * a1 * a1
        d = b * b - 4.0 * a * c
        if d < 0:
            continue
        for y2 in ((-b + math.sqrt(d)) / (2.0 * a), (-b - math.sqrt(d)) / (2.0 * a)):
            if y2 > 0:
                out.append(complex(X, math.sqrt(y2)))
    return np.array(out, dtype=complex)


def tm3_borderline_t1(r: float, sigma: float, tau: float, points: int = EXTERNAL_POINTS) -> Borderline:
    """Borderline of the t = 1 TLCE domain for r in (0, 1).

    The external curve is the zero set of F1(G, 0) with u1-, u2- inside, solved in
    its U-system form between the real-axis crossings; the internal curve exists
    for r > r_c. Both are mapped to the eigenvalue plane by F2 and mirrored in the
    real axis.
    """
    if not 0 < r < 1:
        raise ParameterError(f"the t = 1 borderline is analysed for r in (0, 1), got {r}")
    a1, a2, _ = exponential_kernel_params(sigma, tau)
    cross = tm3_crossings(r, sigma, tau)
    x_lo, x_hi = min(cross["X"]), max(cross["X"])
    ext = _external_curve(r, a1, a2, x_lo, x_hi, points)
    f1_ext, z_ext = _t1_F(ext, EXTERNAL_SET, r, a1, a2)
    ring = ext.imag > 0
    diag = [_printed_external(g.real, g.imag, r, a1, a2) for g in ext[ring]]
    u_res = max((d[0] for d in diag), default=0.0)
    map_dev = max((abs(d[1] - z) for d, z in zip(diag, z_ext[ring])), default=0.0)
    f1_res = float(np.max(np.abs(f1_ext) * np.abs(ext) ** 2, initial=0.0))

    r_c = critical_ratio(tau)
    internal = _internal_curve(r, a1, a2, points) if r > r_c else np.zeros(0, dtype=complex)
    if internal.size:
        _, z_int = _t1_F(internal, INTERNAL_SET, r, a1, a2)
    else:
        z_int = np.zeros(0, dtype=complex)

    z_all = np.concatenate([z_ext, np.conj(z_ext), z_int, np.conj(z_int)])
    branch = np.concatenate([np.zeros(2 * z_ext.size, dtype=int), np.ones(2 * z_int.size, dtype=int)])
    crossings_x = [float(v) for v in cross["x"]]
    meta = {
        "r": r,
        "sigma": sigma,
        "tau": tau,
        "t": 1,
        "r_c": r_c,
        "has_hole": bool(z_int.size),
        "crossings_X": cross["X"],
        "crossings_x": crossings_x,
        "crossings_x_printed": cross["x_printed"],
        "u_system_residual": float(u_res),
        "printed_map_deviation": float(map_dev),
        "f1_residual": f1_res,
        "g_points": np.concatenate([ext, internal]),
    }
    logger.info("tm3_borderline_t1 r=%.4g tau=%.4g r_c=%.5f external=%d internal=%d", r, tau, r_c, ext.size, internal.size)
    return Borderline("parametric_curve", points=z_all, branch=branch, metadata=meta)
