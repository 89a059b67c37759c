"""Experiment configuration.

An ExperimentConfig is loaded from YAML (.yaml / .yml) or JSON (.json); both encode
the same schema. CLI flags override the file through with_overrides().
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution
from src.errors import ParameterError
from src.sampling.returns import DEFAULT_MAX_ENTRIES, check_dimensions

logger = logging.getLogger(__name__)


class SizesConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1, description="Number of assets N")
    t_len: int = Field(..., ge=1, description="Number of time steps T")
    iterations: int = Field(1, ge=1)
    max_entries: float = Field(DEFAULT_MAX_ENTRIES, gt=0)


class HistogramConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["auto", "radial", "real_line", "grid2d"] = "auto"
    nbins: int = Field(100, ge=10)
    r_max_factor: float = Field(1.05, gt=0, description="Radial range as a multiple of the spectral radius")
    r_max: Optional[float] = Field(None, gt=0)
    x_min: Optional[float] = None
    x_max: Optional[float] = None


class TheoryConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    solvers: List[str] = Field(default_factory=list, description="Variants, e.g. wrong-law, t1, grid, density")
    grid_points: Optional[int] = Field(None, ge=10)
    epsilon: Optional[float] = Field(None, gt=0)
    nbins: Optional[int] = Field(None, ge=10)
    resolution: Optional[int] = Field(None, ge=5)
    refine: Optional[int] = Field(None, ge=1)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "runs"
    save_returns: bool = False


class ExperimentConfig(BaseModel):
    """One reproducible experiment: model, returns, estimator, sizes and outputs."""

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    seed: int = Field(..., ge=0, description="Base seed; mandatory for reproducibility")
    model: ModelSpec
    distribution: ReturnDistribution = Field(default_factory=ReturnDistribution)
    estimator: EstimatorSpec = Field(default_factory=EstimatorSpec)
    sizes: SizesConfig
    histogram: HistogramConfig = Field(default_factory=HistogramConfig)
    theory: TheoryConfig = Field(default_factory=TheoryConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    threads: Optional[int] = Field(None, ge=1)
    allow_large_lag: bool = False

    @model_validator(mode="after")
    def _check_run(self) -> "ExperimentConfig":
        check_dimensions(self.sizes.n, self.sizes.t_len, self.sizes.max_entries)
        self.estimator.check_lag(self.sizes.t_len, self.allow_large_lag)
        return self

    @property
    def r(self) -> float:
        """r = N / T."""
        return self.sizes.n / self.sizes.t_len

    @property
    def run_dir(self) -> Path:
        return Path(self.output.directory) / self.name

    def with_overrides(
        self,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out: Optional[str] = None,
        allow_large_lag: Optional[bool] = None,
    ) -> "ExperimentConfig":
        """Copy with CLI flag values applied and re-validated."""
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        if threads is not None:
            data["threads"] = threads
        if out is not None:
            data["output"]["directory"] = out
        if allow_large_lag:
            data["allow_large_lag"] = True
        return ExperimentConfig.model_validate(data)

    def echo(self) -> Dict[str, Any]:
        """JSON-safe dump for manifests and headers."""
        data = self.model_dump(mode="json", exclude_none=True)
        data["r"] = self.r
        return data


def _read(path: Path) -> Dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        return yaml.safe_load(text) or {}
    if path.suffix.lower() == ".json":
        return json.loads(text)
    raise ParameterError(f"unsupported config format {path.suffix!r}; use .yaml, .yml or .json")


def load_config(path: Union[str, Path], allow_large_lag: bool = False) -> ExperimentConfig:
    """Parse and validate an experiment file; allow_large_lag mirrors the CLI flag.

    Raises:
        OSError: when the file cannot be read.
        pydantic.ValidationError / ParameterError: when the content is invalid.
    """
    path = Path(path)
    data = _read(path)
    data.setdefault("name", path.stem)
    if allow_large_lag:
        data["allow_large_lag"] = True
    config = ExperimentConfig.model_validate(data)
    logger.info("config name=%s model=%s estimator=%s n=%d t_len=%d r=%.4g", config.name, config.model.kind, config.estimator.kind, config.sizes.n, config.sizes.t_len, config.r)
    return config
