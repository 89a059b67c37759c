"""Toy-model specifications and their derived covariance kernels."""
from src.covariance.kernels import (
    MarketEntries,
    ewma_weights,
    exponential_kernel_params,
    sector_assignment,
    temporal_fourier_kernel,
    tm2b_variance_quantile,
    tm4c_fourier_entries,
    tm4c_time_covariance,
    tm4c_true_eigenvalues,
    true_variances,
)
from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution, validate_levy

__all__ = [
    "EstimatorSpec",
    "MarketEntries",
    "ModelSpec",
    "ReturnDistribution",
    "ewma_weights",
    "exponential_kernel_params",
    "sector_assignment",
    "temporal_fourier_kernel",
    "tm2b_variance_quantile",
    "tm4c_fourier_entries",
    "tm4c_time_covariance",
    "tm4c_true_eigenvalues",
    "true_variances",
    "validate_levy",
]
