"""Equal-time, time-lagged, weighted and generalized covariance estimators.

The delay is circular and the normalisation is 1/T throughout; the truncated
shift with 1/(T - t) is available for finite-size studies.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.covariance.kernels import ewma_weights
from src.covariance.models import EstimatorSpec, ModelSpec
from src.errors import LagTooLargeError, ParameterError
from src.sampling.returns import ReturnMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EstimatorMatrix:
    data: np.ndarray
    hermitian: bool
    lag: int
    spec: Optional[ModelSpec] = None

    @property
    def n(self) -> int:
        return self.data.shape[0]


def delay_matrix(t_len: int, t: int, modular: bool = True) -> np.ndarray:
    """D_ab(t) = 1 when b = (a + t) mod T; the truncated variant drops the wrap-around."""
    if not 0 <= t < t_len:
        raise LagTooLargeError(f"lag t={t} must satisfy 0 <= t < T={t_len}")
    a = np.arange(t_len)
    b = (a + t) % t_len
    d = np.zeros((t_len, t_len), dtype=complex)
    if modular:
        d[a, b] = 1.0
    else:
        keep = a + t < t_len
        d[a[keep], b[keep]] = 1.0
    return d


def _shift(data: np.ndarray, t: int, modular: bool) -> np.ndarray:
    """R D(t) without building D: column b of the result is column b - t of R."""
    shifted = np.roll(data, t, axis=1)
    if not modular and t:
        shifted[:, :t] = 0.0
    return shifted


def _warn_lag(t: int, t_len: int) -> None:
    if t >= t_len:
        raise LagTooLargeError(f"lag t={t} must be smaller than T={t_len}")
    if t > t_len / 10:
        logger.warning("lag=%d exceeds T/10 at T=%d; rotational symmetry of the spectrum is not expected", t, t_len)


def etce(r: ReturnMatrix) -> EstimatorMatrix:
    """c = R R^dagger / T."""
    x = r.data
    c = x @ x.conj().T / r.t_len
    c = 0.5 * (c + c.conj().T)
    return EstimatorMatrix(c, True, 0, r.spec)


def tlce(r: ReturnMatrix, t: int, modular: bool = True) -> EstimatorMatrix:
    """c(t) = R D(t) R^dagger / T (1 / (T - t) for the truncated shift)."""
    _warn_lag(t, r.t_len)
    if t == 0:
        return etce(r)
    x = r.data
    norm = r.t_len if modular else r.t_len - t
    c = _shift(x, t, modular) @ x.conj().T / norm
    return EstimatorMatrix(c, False, t, r.spec)


def weighted_estimator(r: ReturnMatrix, w: np.ndarray, t: int) -> EstimatorMatrix:
    """R W D(t) W R^dagger / T with W = diag(w)."""
    w = np.asarray(w, dtype=float)
    if w.shape != (r.t_len,):
        raise ParameterError(f"weight vector length {w.size} does not match T={r.t_len}")
    if np.any(w <= 0):
        raise ParameterError("weights must be positive")
    _warn_lag(t, r.t_len)
    xw = r.data * w[None, :]
    c = _shift(xw, t, True) @ xw.conj().T / r.t_len
    if t == 0:
        c = 0.5 * (c + c.conj().T)
    return EstimatorMatrix(c, t == 0, t, r.spec)


def generalized_b(r: ReturnMatrix, e: np.ndarray, f: np.ndarray) -> EstimatorMatrix:
    """b = R E R^dagger F / T."""
    e = np.asarray(e)
    f = np.asarray(f)
    if e.shape != (r.t_len, r.t_len) or f.shape != (r.n, r.n):
        raise ParameterError(f"E must be {r.t_len}x{r.t_len} and F {r.n}x{r.n}; got {e.shape} and {f.shape}")
    b = r.data @ e @ r.data.conj().T @ f / r.t_len
    return EstimatorMatrix(b, False, 0, r.spec)


def levy_estimator_normalization(r: ReturnMatrix, alpha: float, t: int) -> EstimatorMatrix:
    """R D(t) R^dagger T^(-2/alpha) for raw stable entries."""
    _warn_lag(t, r.t_len)
    x = r.data
    c = _shift(x, t, True) @ x.conj().T * r.t_len ** (-2.0 / alpha)
    if t == 0:
        c = 0.5 * (c + c.conj().T)
    return EstimatorMatrix(c, t == 0, t, r.spec)


def estimate(r: ReturnMatrix, spec: EstimatorSpec) -> EstimatorMatrix:
    """Build the estimator named by spec.kind."""
    if r.dist.kind == "FreeLevyProxy" and not r.scaled:
        if spec.kind not in ("ETCE", "TLCE"):
            raise ParameterError(f"{spec.kind} is not defined for Wigner-Levy returns")
        return levy_estimator_normalization(r, r.dist.alpha, spec.lag)
    if spec.kind == "ETCE":
        return etce(r)
    if spec.kind == "TLCE":
        return tlce(r, spec.lag, spec.modular)
    if spec.kind in ("WeightedETCE", "WeightedTLCE"):
        w = ewma_weights(r.t_len, spec.kappa(r.t_len))
        return weighted_estimator(r, w, spec.lag)
    f = spec.F if spec.F is not None else np.eye(r.n)
    return generalized_b(r, np.asarray(spec.E), np.asarray(f))
