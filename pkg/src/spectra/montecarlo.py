"""Monte Carlo driver: sample, estimate and diagonalise over many iterations.

Iteration k draws from RngStream(seed, k); per-iteration spectra are merged in
iteration order, so the result does not depend on the worker count.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Optional

import numpy as np

from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution
from src.estimators.estimators import estimate
from src.sampling.dispatch import sample_returns
from src.sampling.returns import DEFAULT_MAX_ENTRIES
from src.sampling.rng import RngStream
from src.spectra.density import asymmetry_threshold, rotational_asymmetry
from src.spectra.eigen import SpectrumSample, eig_general, eig_hermitian, zero_mode_fraction, zero_modes_per_iteration

logger = logging.getLogger(__name__)


def default_threads() -> int:
    """Logical core count, at least 1."""
    return max(1, os.cpu_count() or 1)


def _one_iteration(
    k: int,
    seed: int,
    spec: ModelSpec,
    dist: ReturnDistribution,
    estimator: EstimatorSpec,
    n: int,
    t_len: int,
    max_entries: float,
) -> np.ndarray:
    r = sample_returns(spec, dist, n, t_len, RngStream(seed, k), max_entries)
    c = estimate(r, estimator)
    if c.hermitian:
        return eig_hermitian(c.data).astype(complex)
    return eig_general(c.data)


def run_monte_carlo(
    spec: ModelSpec,
    dist: ReturnDistribution,
    estimator: EstimatorSpec,
    n: int,
    t_len: int,
    iterations: int,
    seed: int,
    threads: Optional[int] = None,
    max_entries: float = DEFAULT_MAX_ENTRIES,
) -> SpectrumSample:
    """Pooled eigenvalues of the estimator over `iterations` independent samples.

    Args:
        spec: model specification.
        dist: return distribution.
        estimator: estimator settings.
        n: number of assets N.
        t_len: number of time steps T.
        iterations: Monte Carlo iterations.
        seed: base seed.
        threads: worker count, default the logical core count.
        max_entries: upper bound on N*T.

    Returns:
        SpectrumSample with N * iterations eigenvalues in iteration order.
    """
    threads = threads or default_threads()
    args = (seed, spec, dist, estimator, n, t_len, max_entries)
    if threads == 1 or iterations == 1:
        parts = [_one_iteration(k, *args) for k in range(iterations)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda k: _one_iteration(k, *args), range(iterations)))
    eig = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    logger.info("monte_carlo model=%s estimator=%s n=%d t_len=%d iterations=%d threads=%d", spec.kind, estimator.kind, n, t_len, iterations, threads)
    return SpectrumSample(eig, n, t_len, estimator.lag, iterations, spec, estimator.hermitian)


def spectrum_summary(s: SpectrumSample, nsectors: int = 16) -> Dict[str, Any]:
    """Zero-mode statistics, rotational asymmetry and realness of a pooled spectrum."""
    per_iter = zero_modes_per_iteration(s)
    ev = s.eigenvalues
    scale = max(float(np.abs(ev).max()), 1.0) if ev.size else 1.0
    return {
        "count": int(ev.size),
        "n": s.n,
        "t_len": s.t_len,
        "r": s.r,
        "lag": s.lag,
        "iterations": s.iterations,
        "zero_mode_fraction": zero_mode_fraction(s),
        "zero_modes_per_iteration": [int(v) for v in per_iter],
        "expected_zero_modes": max(0, s.n - s.t_len),
        "rotational_asymmetry": rotational_asymmetry(s, nsectors),
        "asymmetry_threshold": asymmetry_threshold(s, nsectors),
        "all_real": bool(np.all(np.abs(ev.imag) <= 1e-12 * scale)),
        "spectral_radius": float(np.abs(ev).max()) if ev.size else 0.0,
    }
