import numpy as np
import pytest

from src.covariance import ModelSpec, ReturnDistribution
from src.errors import ParameterError
from src.sampling.dispatch import sample_returns
from src.sampling.levy import sample_stable, sample_wigner_levy_returns
from src.sampling.returns import (
    check_dimensions,
    sample_gaussian_returns,
    sample_reference_ensemble,
    sample_student_returns,
)
from src.sampling.rng import RngStream


def test_same_stream_same_matrix():
    spec = ModelSpec(kind="TM1")
    a = sample_gaussian_returns(spec, 5, 8, RngStream(42, 3))
    b = sample_gaussian_returns(spec, 5, 8, RngStream(42, 3))
    assert np.array_equal(a.data, b.data)


def test_streams_differ():
    spec = ModelSpec(kind="TM1")
    a = sample_gaussian_returns(spec, 5, 8, RngStream(42, 0))
    b = sample_gaussian_returns(spec, 5, 8, RngStream(42, 1))
    assert not np.array_equal(a.data, b.data)


def test_return_matrix_is_read_only():
    r = sample_gaussian_returns(ModelSpec(kind="TM1"), 3, 4, RngStream(1))
    with pytest.raises(ValueError):
        r.data[0, 0] = 0.0
    assert (r.n, r.t_len) == (3, 4)
    assert (r.seed, r.stream) == (1, 0)


def test_dimension_checks():
    with pytest.raises(ParameterError):
        check_dimensions(1, 10)
    with pytest.raises(ParameterError):
        check_dimensions(100, 100, max_entries=1000)
    with pytest.raises(ParameterError):
        sample_gaussian_returns(ModelSpec(kind="TM1"), 100, 100, RngStream(0), max_entries=1000)


def test_tm1_variance():
    r = sample_gaussian_returns(ModelSpec(kind="TM1", sigma=2.0), 50, 2000, RngStream(7))
    assert np.mean(np.abs(r.data) ** 2) == pytest.approx(4.0, rel=0.03)


def test_tm2a_sector_variances():
    spec = ModelSpec(kind="TM2a", variances=[1.0, 5.0], weights=[0.5, 0.5])
    r = sample_gaussian_returns(spec, 20, 4000, RngStream(9))
    var = np.mean(np.abs(r.data) ** 2, axis=1)
    assert var[:10].mean() == pytest.approx(1.0, rel=0.05)
    assert var[10:].mean() == pytest.approx(5.0, rel=0.05)


def test_tm3_lag_one_autocorrelation():
    tau = 4.0
    r = sample_gaussian_returns(ModelSpec(kind="TM3", tau=tau), 40, 3000, RngStream(5))
    x = r.data
    lag1 = np.mean(x[:, 1:] * x[:, :-1].conj()).real
    var = np.mean(np.abs(x) ** 2)
    assert lag1 / var == pytest.approx(np.exp(-1.0 / tau), abs=0.02)


def test_tm4c_market_row_variance():
    spec = ModelSpec(kind="TM4c", alpha=0.5, beta=0.3, gamma=0.2)
    r = sample_gaussian_returns(spec, 5, 20000, RngStream(11))
    assert np.mean(np.abs(r.data[0]) ** 2) == pytest.approx(1.0 / (1.0 - 0.25), rel=0.05)


def test_student_v1_single_volatility():
    r = sample_student_returns(ModelSpec(kind="TM1"), 1, 3.0, 1.0, 4, 6, RngStream(2))
    assert r.dist.kind == "StudentV1"
    with pytest.raises(ParameterError):
        sample_student_returns(ModelSpec(kind="TM3", tau=1.0), 1, 3.0, 1.0, 4, 6, RngStream(2))


def test_student_v2_column_volatility_shared_by_assets():
    r = sample_student_returns(ModelSpec(kind="TM1"), 2, 3.0, 1.0, 400, 3, RngStream(4))
    col_var = np.mean(np.abs(r.data) ** 2, axis=0)
    assert np.unique(np.round(col_var, 6)).size == 3


def test_stable_alpha_two_is_gaussian():
    x = sample_stable(2.0, 0.0, 0.5, RngStream(3), size=20000)
    assert np.var(x) == pytest.approx(1.0, rel=0.05)


def test_wigner_levy_matrix_scaling():
    raw = sample_wigner_levy_returns(1.5, 0.0, 1.0, 4, 16, RngStream(8), scaled=False)
    scaled = sample_wigner_levy_returns(1.5, 0.0, 1.0, 4, 16, RngStream(8), scaled=True)
    assert np.allclose(scaled.data * 16 ** (1 / 1.5), raw.data)
    assert raw.dist.kind == "FreeLevyProxy"


def test_dispatch_levy_only_on_tm1():
    dist = ReturnDistribution(kind="FreeLevyProxy", alpha=1.5)
    with pytest.raises(ParameterError):
        sample_returns(ModelSpec(kind="TM3", tau=2.0), dist, 4, 8, RngStream(0))
    r = sample_returns(ModelSpec(kind="TM1"), dist, 4, 8, RngStream(0))
    assert r.data.shape == (4, 8)


def test_reference_ensembles():
    gue = sample_reference_ensemble("GUE", 50, 1.0, RngStream(1))
    assert np.allclose(gue, gue.conj().T)
    ginue = sample_reference_ensemble("GinUE", 200, 1.0, RngStream(1))
    assert np.abs(np.linalg.eigvals(ginue)).max() < 1.2
    with pytest.raises(ParameterError):
        sample_reference_ensemble("GOE", 4, 1.0, RngStream(1))
