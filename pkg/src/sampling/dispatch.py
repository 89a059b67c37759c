"""Pick the sampler for a (model, distribution) pair."""
from __future__ import annotations

from src.covariance.models import ModelSpec, ReturnDistribution
from src.errors import ParameterError
from src.sampling.levy import sample_wigner_levy_returns
from src.sampling.returns import DEFAULT_MAX_ENTRIES, ReturnMatrix, sample_gaussian_returns, sample_student_returns
from src.sampling.rng import RngStream


def sample_returns(
    spec: ModelSpec,
    dist: ReturnDistribution,
    n: int,
    t_len: int,
    rng: RngStream,
    max_entries: float = DEFAULT_MAX_ENTRIES,
) -> ReturnMatrix:
    if dist.kind == "Gaussian":
        return sample_gaussian_returns(spec, n, t_len, rng, max_entries)
    if dist.kind in ("StudentV1", "StudentV2"):
        version = 1 if dist.kind == "StudentV1" else 2
        return sample_student_returns(spec, version, dist.mu, dist.scale, n, t_len, rng, max_entries)
    if spec.kind != "TM1":
        raise ParameterError(f"Wigner-Levy returns are defined on TM1 only, got {spec.kind}")
    return sample_wigner_levy_returns(dist.alpha, dist.beta, dist.gamma_range, n, t_len, rng, scaled=False, max_entries=max_entries)
