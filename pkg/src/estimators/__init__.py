"""Covariance estimators built from a return matrix."""
from src.estimators.estimators import (
    EstimatorMatrix,
    delay_matrix,
    estimate,
    etce,
    generalized_b,
    levy_estimator_normalization,
    tlce,
    weighted_estimator,
)

__all__ = [
    "EstimatorMatrix",
    "delay_matrix",
    "estimate",
    "etce",
    "generalized_b",
    "levy_estimator_normalization",
    "tlce",
    "weighted_estimator",
]
