"""Kernels derived from a ModelSpec.

Covers true covariance functions, temporal Fourier kernels, EWMA weights, the
market-mode (TM4c) covariances and their eigenvalues, and the power-law variance
quantile.
Lag convention: C_ij(c) = <R_{i,a} conj(R_{j,a+c})>; Fourier sums run over
u^c for integer c.
"""
from __future__ import annotations

import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from src.covariance.models import SECTOR_KINDS, ModelSpec
from src.errors import (
    DegenerateBetasError,
    NonHermitianCovarianceError,
    ParameterError,
    UnboundedQuantileError,
)

logger = logging.getLogger(__name__)

UNIT_CIRCLE_TOL = 1e-12


class MarketEntries(NamedTuple):
    """Five distinct entries of the market-mode covariance.

    c1: market-market, c2: asset diagonal, c3: market row, c4: market column,
    c_cross: asset-asset off-diagonal.
    """

    c1: complex
    c2: complex
    c3: complex
    c4: complex
    c_cross: complex


def exponential_kernel_params(sigma: float, tau: float) -> Tuple[float, float, float]:
    """(A1, A2, chi) = (2 sigma^2 sinh(1/tau), 2 cosh(1/tau), coth(1/tau))."""
    x = 1.0 / tau
    with np.errstate(over="ignore"):
        a1 = 2.0 * sigma ** 2 * np.sinh(x)
        a2 = 2.0 * np.cosh(x)
    chi = 1.0 / np.tanh(x)
    return float(a1), float(a2), float(chi)


def _exponential_hat(sigma2: float, tau: float, u: complex) -> complex:
    # A1 / (A2 - u - 1/u), divided through by e^{1/tau} so tau -> 0 stays finite
    e = np.exp(-1.0 / tau)
    return complex(sigma2 * (1.0 - e * e) / (1.0 + e * e - (u + 1.0 / u) * e))


def _check_unit(u: complex) -> None:
    if abs(abs(u) - 1.0) > UNIT_CIRCLE_TOL:
        raise ParameterError(f"u must lie on the unit circle, |u|={abs(u)}")


def temporal_fourier_kernel(spec: ModelSpec, u: complex):
    """Fourier transform of the temporal covariance at u on the unit circle.

    Args:
        spec: model specification.
        u: point with |u| = 1.

    Returns:
        Complex scalar for TM1/TM2a/TM2b (always 1), TM3 and TM4a; a complex vector of
        per-sector values for TM4b.
    """
    _check_unit(u)
    if spec.kind in ("TM1", "TM2a", "TM2b"):
        return 1.0 + 0j
    if spec.kind == "TM3":
        return _exponential_hat(spec.sigma ** 2, spec.tau, u)
    if spec.kind == "TM4a":
        return _exponential_hat(1.0, spec.tau, u)
    if spec.kind == "TM4b":
        return np.array([_exponential_hat(v, t, u) for v, t in zip(spec.variances, spec.taus)])
    raise ParameterError("TM4c has a matrix kernel; use tm4c_fourier_entries")


def ewma_weights(t_len: int, kappa: float) -> np.ndarray:
    """EWMA amplitudes w_a, a = 1..T, with w_a^2 proportional to kappa^{-a} and sum T.

    Args:
        t_len: number of time steps T >= 1.
        kappa: decay in (0, 1).

    Returns:
        Positive increasing vector of length T (amplitudes, not squares).
    """
    if t_len < 1:
        raise ParameterError(f"T must be at least 1, got {t_len}")
    if not 0 < kappa < 1:
        raise ParameterError(f"kappa must lie in (0, 1), got {kappa}")
    log_k = np.log(kappa)
    y = -t_len * log_k
    log_den = y + np.log(-np.expm1(-y))
    a = np.arange(1, t_len + 1)
    log_w2 = np.log(t_len * (1.0 - kappa)) - a * log_k - log_den
    w2 = np.exp(log_w2 - log_w2.max())
    w2 *= t_len / w2.sum()
    return np.sqrt(w2)


def _market(spec: ModelSpec) -> Tuple[float, float, float]:
    if spec.kind != "TM4c":
        raise ParameterError(f"market-mode kernels need TM4c, got {spec.kind}")
    if spec.alpha == spec.gamma:
        raise DegenerateBetasError(spec.alpha, spec.gamma)
    return spec.alpha, spec.beta, spec.gamma


def tm4c_time_covariance(spec: ModelSpec, c: int) -> MarketEntries:
    """Time-domain market-mode covariances at lag c (idiosyncratic variances fixed to 1)."""
    al, be, ga = _market(spec)
    k = abs(c)
    c11 = al ** k / (1 - al ** 2)
    d = (al - ga) * (1 - al * ga)
    cii = be ** 2 * al ** (1 + k) / ((1 - al ** 2) * d) + (1 - be ** 2 * ga / d) * ga ** k / (1 - ga ** 2)
    lead = be / (al - ga) * (al ** k / (1 - al ** 2) - ga ** k / (1 - al * ga))
    trail = be * al ** (1 + k) / ((1 - al ** 2) * (1 - al * ga))
    c1i, ci1 = (lead, trail) if c >= 0 else (trail, lead)
    cij = be ** 2 / d * (al ** (1 + k) / (1 - al ** 2) - ga ** (1 + k) / (1 - ga ** 2))
    return MarketEntries(c11, cii, c1i, ci1, cij)


def tm4c_fourier_entries(spec: ModelSpec, u: complex) -> MarketEntries:
    """Fourier transforms of the five market-mode entries at |u| = 1."""
    al, be, ga = _market(spec)
    _check_unit(u)
    ui = 1.0 / u
    a_u, a_ui = 1.0 / (1 - al * u), 1.0 / (1 - al * ui)
    g_u, g_ui = 1.0 / (1 - ga * u), 1.0 / (1 - ga * ui)
    c1 = a_u * a_ui
    c_cross = be ** 2 * c1 * g_u * g_ui
    c2 = g_u * g_ui + c_cross
    c3 = be * u * a_u * a_ui * g_u
    c4 = be * ui * a_ui * g_ui * a_u
    return MarketEntries(complex(c1), complex(c2), complex(c3), complex(c4), complex(c_cross))


def tm4c_true_eigenvalues(spec: ModelSpec, c: int, n: Optional[int] = None) -> Tuple[float, float, float]:
    """Eigenvalues of the N x N market-mode covariance at lag c.

    Returns:
        (lambda1, lambda2, lambda3): the (N-2)-fold degenerate value and the two roots of
        the market quadratic with lambda3 >= lambda2.
    """
    al, be, ga = _market(spec)
    n = n if n is not None else spec.n_assets
    if n is None or n < 3:
        raise ParameterError(f"TM4c eigenvalues need N >= 3, got {n}")
    k = abs(c)
    lam1 = ga ** k / (1 - ga ** 2)
    d = (al - ga) * (1 - al * ga)
    qa = (1 - al ** 2) * (1 - ga ** 2) * (al - ga) * (1 - al * ga) ** 2
    qb = -(
        (1 - ga ** 2) * (d + (n - 1) * be ** 2 * al) * al ** k
        + (1 - al ** 2) * (d - (n - 1) * be ** 2 * ga) * ga ** k
    ) * (1 - al * ga)
    qc = (al - ga) * ((1 - al * ga) ** 2 + (n - 1) * be ** 2) * (al * ga) ** k
    disc = qb * qb - 4 * qa * qc
    if disc < -1e-12 * qb * qb:
        raise NonHermitianCovarianceError(c)
    root = np.sqrt(max(disc, 0.0))
    lo, hi = sorted(((-qb - root) / (2 * qa), (-qb + root) / (2 * qa)))
    return float(lam1), float(lo), float(hi)


def tm2b_variance_quantile(lambda_min: float, q: float, mu: float = 2.0) -> float:
    """Inverse CDF of the power-law variance density with mean 1."""
    if q >= 1:
        raise UnboundedQuantileError(q)
    if q < 0:
        raise ParameterError(f"quantile level must be nonnegative, got {q}")
    if mu <= 1 or not 0 < lambda_min < 1 - 1 / mu:
        raise ParameterError(f"lambda_min={lambda_min} outside (0, 1 - 1/mu) for mu={mu}")
    a = 1.0 - lambda_min
    return float(1.0 - mu * a + (mu - 1.0) * a * (1.0 - q) ** (-1.0 / mu))


def sector_assignment(weights, n: int) -> np.ndarray:
    """Sector index per row; counts by the largest-remainder rule, rows filled in order."""
    w = np.asarray(weights, dtype=float)
    exact = w * n
    counts = np.floor(exact).astype(int)
    short = n - counts.sum()
    order = np.argsort(-(exact - counts), kind="stable")
    counts[order[:short]] += 1
    return np.repeat(np.arange(w.size), counts)


def true_variances(spec: ModelSpec, n: int) -> np.ndarray:
    """Deterministic per-row variances for N assets."""
    if spec.kind in ("TM1", "TM3"):
        return np.full(n, spec.sigma ** 2)
    if spec.kind in SECTOR_KINDS:
        return np.asarray(spec.variances, dtype=float)[sector_assignment(spec.weights, n)]
    if spec.kind == "TM2b":
        q = (np.arange(n) + 0.5) / n
        return np.array([tm2b_variance_quantile(spec.lambda_min, qi, spec.mu) for qi in q])
    entries = tm4c_time_covariance(spec, 0)
    out = np.full(n, float(entries.c2))
    out[0] = entries.c1
    return out
