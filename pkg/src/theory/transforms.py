"""MTransform factories for the priors used by the toy models.

Each factory returns the holomorphic M-transform of a true covariance (C) or a
temporal prior (A) together with the moments the radius formulas need.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from src.covariance.kernels import tm2b_variance_quantile
from src.errors import ParameterError
from src.numerics.special import special_log_gamma
from src.theory.types import MTransform

QUAD_LIMIT = 200
POLE_GUARD = 1e-2


def identity_transform(sigma2: float = 1.0) -> MTransform:
    """C = sigma^2 I: M(z) = sigma^2 / (z - sigma^2)."""
    if sigma2 <= 0:
        raise ParameterError(f"sigma^2 must be positive, got {sigma2}")
    return MTransform(
        "identity",
        lambda z: sigma2 / (z - sigma2),
        sigma2,
        sigma2 ** 2,
        1.0 / sigma2,
        1.0 / sigma2 ** 2,
        prime=lambda z: -sigma2 / (z - sigma2) ** 2,
        params={"sigma2": sigma2, "m4": sigma2 ** 4},
    )


def sectors_transform(variances: Sequence[float], weights: Sequence[float]) -> MTransform:
    """K sectors with variances sigma_k^2 and weights p_k."""
    v = np.asarray(variances, dtype=float)
    p = np.asarray(weights, dtype=float)
    if v.shape != p.shape or v.size == 0:
        raise ParameterError("variances and weights must be non-empty and of equal length")
    if np.any(v <= 0) or np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ParameterError("variances and weights must be positive, weights summing to 1")

    def evaluate(z: complex) -> complex:
        return complex(np.sum(p * v / (z - v)))

    def prime(z: complex) -> complex:
        return complex(-np.sum(p * v / (z - v) ** 2))

    return MTransform(
        "sectors",
        evaluate,
        float(np.sum(p * v)),
        float(np.sum(p * v ** 2)),
        float(np.sum(p / v)),
        float(np.sum(p / v ** 2)),
        prime=prime,
        params={"variances": v.tolist(), "weights": p.tolist(), "m4": float(np.sum(p * v ** 4))},
    )


def _quantile_transform(quantile, z: complex) -> complex:
    """M(z) = int_0^1 lambda(q) / (z - lambda(q)) dq for a prior given by its quantile function."""

    def part(fn):
        return quad(lambda q: fn(quantile(q) / (z - quantile(q))), 0.0, 1.0, limit=QUAD_LIMIT, epsabs=1e-13, epsrel=1e-12)[0]

    return complex(part(lambda w: w.real), part(lambda w: w.imag))


def power_law_transform(lambda_min: float, mu: float = 2.0) -> MTransform:
    """Power-law variance density mu (mu-1)^mu a^mu / (lambda - 1 + mu a)^(mu+1), a = 1 - lambda_min.

    mu = 2 has a closed form with the principal log(lambda_min - z), analytic off
    [lambda_min, inf); other slopes and the removable point z = -(1 - 2 lambda_min)
    use quadrature over the quantile function.
    """
    if mu <= 1 or not 0 < lambda_min < 1 - 1 / mu:
        raise ParameterError(f"lambda_min={lambda_min} outside (0, 1 - 1/mu) for mu={mu}")
    a = 1.0 - lambda_min
    f0 = 1.0 - 2.0 * lambda_min

    def quantile(q: float) -> float:
        return tm2b_variance_quantile(lambda_min, min(q, 1.0 - 1e-16), mu)

    def closed(z: complex) -> complex:
        z = complex(z)
        if abs(z + f0) < POLE_GUARD * (1.0 + f0):
            return _quantile_transform(quantile, z)
        log_term = np.log(lambda_min - z) - math.log(a)
        return complex(((f0 + z) * (z - f0 ** 2) + 2.0 * a ** 2 * z * log_term) / (f0 + z) ** 3)

    evaluate = closed if mu == 2.0 else (lambda z: _quantile_transform(quantile, complex(z)))
    m2 = 1.0 + a ** 2 * mu / (mu - 2.0) if mu > 2 else math.inf
    return MTransform("power_law", evaluate, 1.0, m2, params={"lambda_min": lambda_min, "mu": mu})


def ewma_transform(theta: float) -> MTransform:
    """Exponential weights w(x) = theta e^(theta x) / (e^theta - 1) on [0, 1].

    M(z) = log((z - l0) / (z - l1)) / theta with l1 - l0 = theta, written through
    log1p so the cut sits on [l0, l1] and small theta stays accurate.
    """
    if theta < 0:
        raise ParameterError(f"EWMA theta must be nonnegative, got {theta}")
    if theta == 0:
        return identity_transform(1.0)
    lam1 = theta / -math.expm1(-theta)
    h = theta / 2.0

    def evaluate(z: complex) -> complex:
        return complex(np.log1p(theta / (z - lam1)) / theta)

    def prime(z: complex) -> complex:
        lam0 = lam1 - theta
        return complex(-1.0 / ((z - lam0) * (z - lam1)))

    return MTransform(
        "ewma",
        evaluate,
        1.0,
        h / math.tanh(h),
        (math.sinh(h) / h) ** 2,
        math.sinh(h) ** 3 * math.cosh(h) / h ** 3,
        prime=prime,
        params={"theta": theta, "lambda0": lam1 - theta, "lambda1": lam1},
    )


def student_transform(mu: float, theta: float) -> MTransform:
    """Temporal prior of Student returns, version 2: A = diag(1 / v_a), v ~ Gamma(mu/2, scale 2/theta^2).

    M(z) = <1 / (z v - 1)>, integrated against the gamma density.
    """
    if mu <= 0 or theta <= 0:
        raise ParameterError(f"Student parameters must be positive, got mu={mu}, theta={theta}")
    k = mu / 2.0
    scale = 2.0 / theta ** 2
    log_norm = -special_log_gamma(k) - k * math.log(scale)

    def pdf(v: float) -> float:
        if v <= 0:
            return 0.0
        return math.exp((k - 1.0) * math.log(v) - v / scale + log_norm)

    def evaluate(z: complex) -> complex:
        z = complex(z)
        kw = dict(limit=QUAD_LIMIT, epsabs=1e-13, epsrel=1e-12)
        re = quad(lambda v: (1.0 / (z * v - 1.0)).real * pdf(v), 0.0, math.inf, **kw)[0]
        im = quad(lambda v: (1.0 / (z * v - 1.0)).imag * pdf(v), 0.0, math.inf, **kw)[0]
        return complex(re, im)

    m1 = theta ** 2 / (mu - 2.0) if mu > 2 else math.inf
    m2 = theta ** 4 / ((mu - 2.0) * (mu - 4.0)) if mu > 4 else math.inf
    return MTransform(
        "student",
        evaluate,
        m1,
        m2,
        mu / theta ** 2,
        mu * (mu + 2.0) / theta ** 4,
        params={"mu": mu, "theta": theta},
    )


def exponential_kernel_transform(sigma: float, tau: float) -> MTransform:
    """A_ab = sigma^2 exp(-|a - b| / tau): spectrum sigma^2 [tanh(1/2tau), coth(1/2tau)].

    M(z) = 1 / (sqrt(z/sigma^2 - tanh) sqrt(z/sigma^2 - coth)); the product of principal
    roots is analytic off the spectral segment.
    """
    if sigma <= 0 or tau <= 0:
        raise ParameterError(f"sigma and tau must be positive, got {sigma}, {tau}")
    s2 = sigma ** 2
    th = math.tanh(0.5 / tau)
    cth = 1.0 / th
    chi = 1.0 / math.tanh(1.0 / tau)

    def evaluate(z: complex) -> complex:
        w = complex(z) / s2
        return complex(1.0 / (np.sqrt(w - th) * np.sqrt(w - cth)))

    return MTransform("exponential_kernel", evaluate, s2, s2 ** 2 * chi, params={"sigma": sigma, "tau": tau, "chi": chi})


def squared_transform(m: MTransform, m4: Optional[float] = None) -> MTransform:
    """M-transform of C^2 from that of C: (M(sqrt w) + M(-sqrt w)) / 2."""

    def evaluate(w: complex) -> complex:
        root = np.sqrt(complex(w))
        return 0.5 * (m(root) + m(-root))

    m4 = m4 if m4 is not None else m.params.get("m4", math.nan)
    return MTransform(f"{m.name}_squared", evaluate, m.m2, m4, params={"base": m.name})


def transform_for_model(spec) -> MTransform:
    """M-transform of the spatial covariance C of a rotationally symmetric model."""
    if spec.kind == "TM1":
        return identity_transform(spec.sigma ** 2)
    if spec.kind == "TM2a":
        return sectors_transform(spec.variances, spec.weights)
    if spec.kind == "TM2b":
        return power_law_transform(spec.lambda_min, spec.mu)
    raise ParameterError(f"{spec.kind} has no rotationally symmetric C prior")
