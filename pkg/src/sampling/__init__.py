"""Seeded return-matrix generation for every model and distribution."""
from src.sampling.dispatch import sample_returns
from src.sampling.levy import sample_stable, sample_wigner_levy_returns
from src.sampling.returns import (
    ReturnMatrix,
    check_dimensions,
    inverse_gamma_volatility,
    sample_gaussian_returns,
    sample_reference_ensemble,
    sample_student_returns,
    tm4c_burn_in,
)
from src.sampling.rng import RngStream, as_generator, complex_normal

__all__ = [
    "ReturnMatrix",
    "RngStream",
    "as_generator",
    "check_dimensions",
    "complex_normal",
    "inverse_gamma_volatility",
    "sample_gaussian_returns",
    "sample_reference_ensemble",
    "sample_returns",
    "sample_stable",
    "sample_student_returns",
    "sample_wigner_levy_returns",
    "tm4c_burn_in",
]
