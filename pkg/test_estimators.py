import logging

import numpy as np
import pytest

from src.covariance import EstimatorSpec, ModelSpec
from src.errors import LagTooLargeError, ParameterError
from src.estimators import delay_matrix, estimate, etce, generalized_b, levy_estimator_normalization, tlce, weighted_estimator
from src.sampling.levy import sample_wigner_levy_returns
from src.sampling.returns import sample_gaussian_returns
from src.sampling.rng import RngStream


def _returns(n=6, t_len=12, seed=3):
    return sample_gaussian_returns(ModelSpec(kind="TM1"), n, t_len, RngStream(seed))


def test_delay_matrix_is_cyclic_permutation():
    d = delay_matrix(5, 2)
    assert np.allclose(d.sum(axis=0), 1) and np.allclose(d.sum(axis=1), 1)
    assert d[4, 1] == 1
    assert np.allclose(np.linalg.matrix_power(d, 5), np.eye(5))


def test_delay_matrix_truncated_drops_wraparound():
    d = delay_matrix(5, 2, modular=False)
    assert d.sum() == 3
    assert d[4, 1] == 0


def test_delay_matrix_lag_range():
    with pytest.raises(LagTooLargeError):
        delay_matrix(5, 5)


def test_tlce_matches_explicit_delay_product():
    r = _returns()
    for modular in (True, False):
        c = tlce(r, 1, modular)
        d = delay_matrix(r.t_len, 1, modular)
        norm = r.t_len if modular else r.t_len - 1
        assert np.allclose(c.data, r.data @ d @ r.data.conj().T / norm)


def test_etce_is_hermitian_and_tlce_zero_lag_reduces():
    r = _returns()
    c = etce(r)
    assert c.hermitian
    assert np.allclose(c.data, c.data.conj().T)
    assert np.allclose(tlce(r, 0).data, c.data)


def test_tlce_rank_deficient_when_n_exceeds_t():
    r = _returns(n=10, t_len=4)
    ev = np.abs(np.linalg.eigvals(tlce(r, 1).data))
    assert int(np.sum(ev < 1e-9 * ev.max())) == 6


def test_large_lag_logs_warning(caplog):
    r = _returns(n=4, t_len=20)
    with caplog.at_level(logging.WARNING):
        tlce(r, 5)
    assert any("exceeds T/10" in rec.message for rec in caplog.records)


def test_weighted_estimator_unit_weights_is_tlce():
    r = _returns()
    w = np.ones(r.t_len)
    assert np.allclose(weighted_estimator(r, w, 1).data, tlce(r, 1).data)
    assert weighted_estimator(r, w, 0).hermitian


def test_weighted_estimator_rejects_bad_weights():
    r = _returns()
    with pytest.raises(ParameterError):
        weighted_estimator(r, np.ones(r.t_len - 1), 1)
    with pytest.raises(ParameterError):
        weighted_estimator(r, -np.ones(r.t_len), 1)


def test_generalized_b_reduces_to_tlce():
    r = _returns()
    d = delay_matrix(r.t_len, 2)
    b = generalized_b(r, d, np.eye(r.n))
    assert np.allclose(b.data, tlce(r, 2).data)


def test_estimate_dispatch():
    r = _returns()
    assert estimate(r, EstimatorSpec(kind="ETCE")).hermitian
    assert estimate(r, EstimatorSpec(kind="TLCE", lag=1)).lag == 1
    weighted = estimate(r, EstimatorSpec(kind="WeightedTLCE", lag=1, ewma_theta=1.0))
    assert weighted.data.shape == (r.n, r.n)
    e = np.eye(r.t_len)
    assert np.allclose(estimate(r, EstimatorSpec(kind="GeneralizedB", E=e)).data, etce(r).data)


def test_levy_returns_use_stable_normalisation():
    r = sample_wigner_levy_returns(1.5, 0.0, 1.0, 4, 16, RngStream(1), scaled=False)
    c = estimate(r, EstimatorSpec(kind="TLCE", lag=1))
    expected = np.roll(r.data, 1, axis=1) @ r.data.conj().T * 16 ** (-2 / 1.5)
    assert np.allclose(c.data, expected)
    with pytest.raises(ParameterError):
        estimate(r, EstimatorSpec(kind="WeightedETCE", ewma_theta=1.0))


def test_levy_normalisation_at_lag_zero_is_hermitian():
    r = sample_wigner_levy_returns(1.2, 0.0, 1.0, 5, 20, RngStream(4), scaled=False)
    c = levy_estimator_normalization(r, 1.2, 0)
    assert c.hermitian and c.lag == 0
    assert np.allclose(c.data, c.data.conj().T)
    assert np.allclose(c.data, r.data @ r.data.conj().T * 20 ** (-2 / 1.2))
