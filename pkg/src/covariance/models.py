"""Declarative specifications: toy models, return distributions and estimators.

ModelSpec is the single source of truth for both sampling and theory. All three
schemas are pydantic models so experiment files are validated on load.
"""
from __future__ import annotations

import logging
import math
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import LagTooLargeError, ParameterError

logger = logging.getLogger(__name__)

ModelKind = Literal["TM1", "TM2a", "TM2b", "TM3", "TM4a", "TM4b", "TM4c"]
DistributionKind = Literal["Gaussian", "StudentV1", "StudentV2", "FreeLevyProxy"]
EstimatorKind = Literal["ETCE", "TLCE", "WeightedETCE", "WeightedTLCE", "GeneralizedB"]

SECTOR_KINDS = ("TM2a", "TM4a", "TM4b")
TEMPORAL_KINDS = ("TM3", "TM4a", "TM4b")


class ModelSpec(BaseModel):
    """Toy model identifier plus its parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ModelKind
    sigma: float = Field(1.0, gt=0, description="Volatility (TM1, TM3)")
    variances: Optional[List[float]] = Field(None, description="Sector variances sigma_k^2")
    weights: Optional[List[float]] = Field(None, description="Sector weights p_k summing to 1")
    lambda_min: Optional[float] = Field(None, description="Lower edge of the power-law variance density")
    mu: float = Field(2.0, description="Power-law slope (TM2b)")
    tau: Optional[float] = Field(None, description="Autocorrelation time (TM3, TM4a)")
    taus: Optional[List[float]] = Field(None, description="Per-sector autocorrelation times (TM4b)")
    alpha: Optional[float] = Field(None, description="Market self-coupling (TM4c)")
    beta: Optional[float] = Field(None, description="Market-to-asset coupling (TM4c)")
    gamma: Optional[float] = Field(None, description="Asset self-coupling (TM4c)")
    n_assets: Optional[int] = Field(None, ge=3, description="Number of assets N (TM4c eigenvalues)")

    @model_validator(mode="after")
    def _check_kind_params(self) -> "ModelSpec":
        if self.kind in SECTOR_KINDS:
            if not self.variances or not self.weights:
                raise ParameterError(f"{self.kind} requires variances and weights")
            if len(self.variances) != len(self.weights):
                raise ParameterError("variances and weights must have equal length")
            if any(v <= 0 for v in self.variances):
                raise ParameterError("all variances must be positive")
            if any(p <= 0 for p in self.weights):
                raise ParameterError("all weights must be positive")
            if abs(sum(self.weights) - 1.0) > 1e-9:
                raise ParameterError(f"weights must sum to 1, got {sum(self.weights):.12g}")
        if self.kind == "TM2b":
            if self.mu <= 1:
                raise ParameterError("mu must exceed 1")
            if self.lambda_min is None or not 0 < self.lambda_min < 1 - 1 / self.mu:
                raise ParameterError(f"lambda_min must lie in (0, {1 - 1 / self.mu:.6g}), got {self.lambda_min}")
        if self.kind in ("TM3", "TM4a") and (self.tau is None or self.tau <= 0):
            raise ParameterError(f"{self.kind} requires tau > 0")
        if self.kind == "TM4b":
            if not self.taus or len(self.taus) != len(self.variances or []):
                raise ParameterError("TM4b requires one tau per sector")
            if any(t <= 0 for t in self.taus):
                raise ParameterError("all taus must be positive")
        if self.kind == "TM4c":
            for name in ("alpha", "gamma"):
                v = getattr(self, name)
                if v is None or not 0 < v < 1:
                    raise ParameterError(f"TM4c {name} must lie in (0, 1), got {v}")
            if self.beta is None or not math.isfinite(self.beta):
                raise ParameterError("TM4c requires a real beta")
        return self

    def summary(self) -> dict:
        """Non-empty parameters, for headers and logs."""
        return {k: v for k, v in self.model_dump().items() if v is not None}


class ReturnDistribution(BaseModel):
    """Marginal law of the returns on top of the model's covariance."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: DistributionKind = "Gaussian"
    mu: Optional[float] = Field(None, gt=0, description="Student tail exponent")
    theta: Optional[float] = Field(None, gt=0, description="Student scale; defaults to sqrt(mu)")
    alpha: float = Field(2.0, description="Stability index")
    beta: float = Field(0.0, description="Skewness")
    gamma_range: float = Field(1.0, description="Range parameter")

    @model_validator(mode="after")
    def _check(self) -> "ReturnDistribution":
        if self.kind in ("StudentV1", "StudentV2"):
            if self.mu is None:
                raise ParameterError(f"{self.kind} requires mu")
        if self.kind == "FreeLevyProxy":
            validate_levy(self.alpha, self.beta, self.gamma_range)
        return self

    @property
    def scale(self) -> float:
        """Student scale theta, sqrt(mu) when not given."""
        return self.theta if self.theta is not None else math.sqrt(self.mu)

    @property
    def has_finite_variance(self) -> bool:
        if self.kind in ("StudentV1", "StudentV2"):
            return self.mu > 2
        if self.kind == "FreeLevyProxy":
            return self.alpha == 2
        return True


def validate_levy(alpha: float, beta: float, gamma_range: float) -> None:
    if not 0 < alpha <= 2:
        raise ParameterError(f"stability index alpha must lie in (0, 2], got {alpha}")
    if not -1 <= beta <= 1:
        raise ParameterError(f"skewness beta must lie in [-1, 1], got {beta}")
    if gamma_range <= 0:
        raise ParameterError(f"range gamma must be positive, got {gamma_range}")
    if alpha == 1 and beta != 0:
        raise ParameterError("alpha = 1 with nonzero skewness is not supported")


class EstimatorSpec(BaseModel):
    """Which covariance estimator to build from a return matrix."""

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    kind: EstimatorKind = "TLCE"
    lag: int = Field(0, ge=0, description="Time lag t")
    ewma_theta: Optional[float] = Field(None, gt=0, description="EWMA parameter theta = T (1 - kappa)")
    modular: bool = Field(True, description="Circular delay; False gives the truncated shift")
    E: Optional[Any] = Field(None, description="T x T matrix for GeneralizedB")
    F: Optional[Any] = Field(None, description="N x N matrix for GeneralizedB")

    @model_validator(mode="after")
    def _check(self) -> "EstimatorSpec":
        if self.kind in ("ETCE", "WeightedETCE") and self.lag != 0:
            raise ParameterError(f"{self.kind} has no lag; got lag={self.lag}")
        if self.kind in ("WeightedETCE", "WeightedTLCE") and self.ewma_theta is None:
            raise ParameterError(f"{self.kind} requires ewma_theta")
        if self.kind == "GeneralizedB" and self.E is None:
            raise ParameterError("GeneralizedB requires the E matrix")
        return self

    @property
    def hermitian(self) -> bool:
        return self.kind in ("ETCE", "WeightedETCE")

    def kappa(self, t_len: int) -> float:
        """EWMA decay kappa = 1 - theta / T."""
        if self.ewma_theta is None:
            raise ParameterError("estimator has no EWMA parameter")
        kappa = 1.0 - self.ewma_theta / t_len
        if not 0 < kappa < 1:
            raise ParameterError(f"ewma_theta={self.ewma_theta} gives kappa={kappa} outside (0, 1) at T={t_len}")
        return kappa

    def check_lag(self, t_len: int, allow_large_lag: bool = False) -> None:
        if self.lag >= t_len:
            raise LagTooLargeError(f"lag t={self.lag} must be smaller than T={t_len}")
        if self.lag > 0.1 * t_len and not allow_large_lag:
            raise LagTooLargeError(f"lag t={self.lag} exceeds T/10={t_len / 10:g}; pass --allow-large-lag to run anyway")
