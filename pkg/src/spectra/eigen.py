"""Eigenvalue extraction and pooled spectrum samples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from src.covariance.models import ModelSpec
from src.errors import ParameterError

ZERO_MODE_REL = 1e-9


def _finite(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ParameterError("matrix has non-finite entries")
    return m


def eig_hermitian(m: np.ndarray) -> np.ndarray:
    """Sorted real eigenvalues of a Hermitian matrix."""
    return linalg.eigvalsh(_finite(m))


def eig_general(m: np.ndarray) -> np.ndarray:
    """Complex eigenvalues of a general square matrix."""
    return linalg.eigvals(_finite(m), check_finite=False)


@dataclass(frozen=True, eq=False)
class SpectrumSample:
    eigenvalues: np.ndarray
    n: int
    t_len: int
    lag: int
    iterations: int
    spec: Optional[ModelSpec] = None
    hermitian: bool = False

    def __post_init__(self) -> None:
        if self.eigenvalues.size != self.n * self.iterations:
            raise ParameterError(f"expected {self.n * self.iterations} eigenvalues, got {self.eigenvalues.size}")

    @property
    def r(self) -> float:
        return self.n / self.t_len

    def zero_mask(self) -> np.ndarray:
        """Eigenvalues below 1e-9 of the spectral radius count as zero modes."""
        mod = np.abs(self.eigenvalues)
        scale = mod.max() if mod.size and mod.max() > 0 else 1.0
        return mod < ZERO_MODE_REL * scale


def zero_mode_fraction(s: SpectrumSample) -> float:
    return float(s.zero_mask().mean()) if s.eigenvalues.size else 0.0


def zero_modes_per_iteration(s: SpectrumSample) -> np.ndarray:
    """Zero-mode count of each Monte Carlo iteration (eigenvalues are stored iteration-major)."""
    return s.zero_mask().reshape(s.iterations, s.n).sum(axis=1)
