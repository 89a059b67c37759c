"""Gaussian and random-volatility return matrices for the toy models.

Temporal exponential kernels come from a stationary AR(1) recursion per row,
which reproduces sigma^2 exp(-|c|/tau) exactly without factorising a T x T matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.stats import gamma as gamma_dist

from src.covariance.kernels import sector_assignment, true_variances
from src.covariance.models import ModelSpec, ReturnDistribution
from src.errors import ParameterError
from src.sampling.rng import RngStream, as_generator, complex_normal

logger = logging.getLogger(__name__)

DEFAULT_MAX_ENTRIES = 5e7


@dataclass(frozen=True, eq=False)
class ReturnMatrix:
    data: np.ndarray
    spec: ModelSpec
    dist: ReturnDistribution
    seed: int
    stream: int = 0
    scaled: bool = True

    @classmethod
    def build(
        cls,
        data: np.ndarray,
        spec: ModelSpec,
        dist: ReturnDistribution,
        rng: Union[RngStream, np.random.Generator],
        scaled: bool = True,
    ) -> "ReturnMatrix":
        if not np.all(np.isfinite(data)):
            raise ParameterError("return matrix has non-finite entries")
        data = np.ascontiguousarray(data, dtype=complex)
        data.flags.writeable = False
        seed = rng.seed if isinstance(rng, RngStream) else -1
        stream = rng.stream if isinstance(rng, RngStream) else 0
        return cls(data, spec, dist, seed, stream, scaled)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def t_len(self) -> int:
        return self.data.shape[1]


def check_dimensions(n: int, t_len: int, max_entries: float = DEFAULT_MAX_ENTRIES) -> None:
    if n < 2 or t_len < 2:
        raise ParameterError(f"need N, T >= 2, got N={n}, T={t_len}")
    if n * t_len > max_entries:
        raise ParameterError(f"N*T={n * t_len} exceeds the configured limit {max_entries:g}")


def _ar1(gen: np.random.Generator, var: np.ndarray, rho: np.ndarray, t_len: int) -> np.ndarray:
    """Stationary complex AR(1) rows: x_a = rho x_{a-1} + xi_a, Var x = var."""
    n = var.size
    out = np.empty((n, t_len), dtype=complex)
    out[:, 0] = np.sqrt(var) * complex_normal(gen, n)
    scale = np.sqrt(var * (1.0 - rho ** 2))
    noise = complex_normal(gen, (n, t_len)) * scale[:, None]
    for a in range(1, t_len):
        out[:, a] = rho * out[:, a - 1] + noise[:, a]
    return out


def tm4c_burn_in(alpha: float, gamma: float) -> int:
    return int(math.ceil(50 * max(1.0 / (1.0 - alpha), 1.0 / (1.0 - gamma))))


def _svar_market(gen: np.random.Generator, spec: ModelSpec, n: int, t_len: int) -> np.ndarray:
    al, be, ga = spec.alpha, spec.beta, spec.gamma
    burn = tm4c_burn_in(al, ga)
    steps = burn + t_len
    e = complex_normal(gen, (n, steps))
    out = np.empty((n, steps), dtype=complex)
    out[:, 0] = e[:, 0]
    for a in range(1, steps):
        out[0, a] = e[0, a] + al * out[0, a - 1]
        out[1:, a] = e[1:, a] + be * out[0, a - 1] + ga * out[1:, a - 1]
    return out[:, burn:]


def sample_gaussian_returns(
    spec: ModelSpec,
    n: int,
    t_len: int,
    rng: RngStream,
    max_entries: float = DEFAULT_MAX_ENTRIES,
) -> ReturnMatrix:
    """Zero-mean complex Gaussian returns with the model's true covariance.

    Args:
        spec: model specification.
        n: number of assets N.
        t_len: number of time steps T.
        rng: random stream; identical streams give identical matrices.
        max_entries: upper bound on N*T.

    Returns:
        ReturnMatrix with Gaussian provenance.
    """
    check_dimensions(n, t_len, max_entries)
    gen = as_generator(rng)
    if spec.kind in ("TM1", "TM2a", "TM2b"):
        sd = np.sqrt(true_variances(spec, n))
        data = sd[:, None] * complex_normal(gen, (n, t_len))
    elif spec.kind in ("TM3", "TM4a"):
        rho = np.full(n, np.exp(-1.0 / spec.tau))
        data = _ar1(gen, true_variances(spec, n), rho, t_len)
    elif spec.kind == "TM4b":
        sectors = sector_assignment(spec.weights, n)
        rho = np.exp(-1.0 / np.asarray(spec.taus, dtype=float))[sectors]
        data = _ar1(gen, np.asarray(spec.variances, dtype=float)[sectors], rho, t_len)
    else:
        data = _svar_market(gen, spec, n, t_len)
    logger.debug("sampled model=%s n=%d t_len=%d seed=%s stream=%s", spec.kind, n, t_len, getattr(rng, "seed", None), getattr(rng, "stream", None))
    return ReturnMatrix.build(data, spec, ReturnDistribution(), rng)


def inverse_gamma_volatility(gen: np.random.Generator, mu: float, theta: float, size) -> np.ndarray:
    """sigma with 1/sigma^2 ~ Gamma(shape mu/2, scale 2/theta^2)."""
    inv_var = gamma_dist.rvs(a=mu / 2.0, scale=2.0 / theta ** 2, size=size, random_state=gen)
    return 1.0 / np.sqrt(inv_var)


def sample_student_returns(
    spec: ModelSpec,
    version: int,
    mu: float,
    theta: float,
    n: int,
    t_len: int,
    rng: RngStream,
    max_entries: float = DEFAULT_MAX_ENTRIES,
) -> ReturnMatrix:
    """Student-t returns as Gaussians with inverse-gamma volatility.

    Version 1 draws one volatility for the whole matrix; version 2 draws an independent
    volatility per time column, shared by all assets.
    """
    if spec.kind != "TM1":
        raise ParameterError(f"Student returns are defined on TM1 only, got {spec.kind}")
    if version not in (1, 2):
        raise ParameterError(f"Student version must be 1 or 2, got {version}")
    if mu <= 0 or theta <= 0:
        raise ParameterError(f"Student parameters must be positive, got mu={mu}, theta={theta}")
    check_dimensions(n, t_len, max_entries)
    gen = as_generator(rng)
    base = spec.sigma * complex_normal(gen, (n, t_len))
    if version == 1:
        data = base * inverse_gamma_volatility(gen, mu, theta, 1)[0]
    else:
        data = base * inverse_gamma_volatility(gen, mu, theta, t_len)[None, :]
    dist = ReturnDistribution(kind="StudentV1" if version == 1 else "StudentV2", mu=mu, theta=theta)
    return ReturnMatrix.build(data, spec, dist, rng)


def sample_reference_ensemble(kind: str, n: int, sigma: float, rng: RngStream) -> np.ndarray:
    """GUE (semicircle of radius 2 sigma) or GinUE (uniform disk of radius sigma) matrix."""
    gen = as_generator(rng)
    a = complex_normal(gen, (n, n))
    if kind == "GUE":
        return sigma * (a + a.conj().T) / np.sqrt(2.0 * n)
    if kind == "GinUE":
        return sigma * a / np.sqrt(n)
    raise ParameterError(f"unknown reference ensemble {kind!r}; expected GUE or GinUE")
