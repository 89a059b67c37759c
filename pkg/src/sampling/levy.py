"""Stable-law sampling and Wigner-Levy return matrices."""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np
from scipy.stats import levy_stable

from src.covariance.models import ModelSpec, ReturnDistribution, validate_levy
from src.sampling.returns import ReturnMatrix, check_dimensions
from src.sampling.rng import RngLike, RngStream, as_generator

logger = logging.getLogger(__name__)


def sample_stable(alpha: float, beta: float, gamma_range: float, rng: RngLike, size: Optional[int] = None):
    """Draws with characteristic function exp(-gamma |k|^alpha (1 - i beta sign(k) tan(pi alpha / 2))).

    This is the S1 parametrisation with scale gamma^(1/alpha); alpha = 2 gives a Gaussian
    of variance 2 gamma.
    """
    validate_levy(alpha, beta, gamma_range)
    gen = as_generator(rng)
    draws = levy_stable.rvs(alpha, beta, loc=0.0, scale=gamma_range ** (1.0 / alpha), size=size, random_state=gen)
    return float(draws) if size is None else np.asarray(draws, dtype=float)


def sample_wigner_levy_returns(
    alpha: float,
    beta: float,
    gamma_range: float,
    n: int,
    t_len: int,
    rng: RngStream,
    scaled: bool = True,
    max_entries: float = 5e7,
) -> ReturnMatrix:
    """N x T matrix of iid real stable entries, divided by T^(1/alpha) when `scaled`.

    Entries use range gamma/2 so the Gaussian endpoint has variance gamma per entry,
    the normalisation under which the free-Levy equations reduce to the Gaussian ones.
    """
    validate_levy(alpha, beta, gamma_range)
    check_dimensions(n, t_len, max_entries)
    h = sample_stable(alpha, beta, gamma_range / 2.0, rng, size=n * t_len).reshape(n, t_len)
    if scaled:
        h = h / t_len ** (1.0 / alpha)
    logger.debug("wigner_levy n=%d t_len=%d alpha=%.3g beta=%.3g scaled=%s", n, t_len, alpha, beta, scaled)
    dist = ReturnDistribution(kind="FreeLevyProxy", alpha=alpha, beta=beta, gamma_range=gamma_range)
    return ReturnMatrix.build(h.astype(complex), ModelSpec(kind="TM1"), dist, rng, scaled=scaled)
