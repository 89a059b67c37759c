import math

import numpy as np
import pytest

from src.covariance import EstimatorSpec, ModelSpec, ReturnDistribution
from src.errors import ParameterError
from src.spectra import (
    SpectrumSample,
    asymmetry_threshold,
    borderline_occupancy,
    curve_from_samples,
    eig_hermitian,
    grid_histogram,
    l1_distance,
    radial_histogram,
    real_histogram,
    rotational_asymmetry,
    run_monte_carlo,
    spectrum_summary,
    zero_mode_fraction,
    zero_modes_per_iteration,
)

TM1 = ModelSpec(kind="TM1")
GAUSS = ReturnDistribution()


def _disk_sample(count=4000, seed=0):
    gen = np.random.default_rng(seed)
    radius = np.sqrt(gen.uniform(size=count))
    ev = radius * np.exp(2j * np.pi * gen.uniform(size=count))
    return SpectrumSample(ev, count, 2 * count, 1, 1)


def test_sample_size_checked():
    with pytest.raises(ParameterError):
        SpectrumSample(np.zeros(3, dtype=complex), 2, 4, 1, 2)


def test_monte_carlo_independent_of_threads():
    est = EstimatorSpec(kind="TLCE", lag=1)
    a = run_monte_carlo(TM1, GAUSS, est, 8, 16, 4, 42, threads=1)
    b = run_monte_carlo(TM1, GAUSS, est, 8, 16, 4, 42, threads=3)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert a.eigenvalues.size == 32


def test_etce_spectrum_is_real_and_positive():
    s = run_monte_carlo(TM1, GAUSS, EstimatorSpec(kind="ETCE"), 10, 40, 2, 5, threads=1)
    summary = spectrum_summary(s)
    assert summary["all_real"]
    assert s.eigenvalues.real.min() > 0


def test_zero_modes_when_n_exceeds_t():
    s = run_monte_carlo(TM1, GAUSS, EstimatorSpec(kind="TLCE", lag=1), 20, 10, 2, 11, threads=1)
    assert zero_mode_fraction(s) == pytest.approx(0.5)
    assert zero_modes_per_iteration(s).tolist() == [10, 10]
    assert spectrum_summary(s)["expected_zero_modes"] == 10


def test_radial_histogram_normalisation():
    s = _disk_sample(20000)
    h = radial_histogram(s, 50, 1.0)
    assert h.integral() == pytest.approx(1.0)
    assert h.mass == pytest.approx(1.0)
    # uniform disk: 2 pi R rho = 2R
    mid = h.centers[(h.centers > 0.2) & (h.centers < 0.8)]
    vals = h.density[(h.centers > 0.2) & (h.centers < 0.8)]
    assert np.max(np.abs(vals - 2 * mid)) < 0.25


def test_histogram_reports_mass_beyond_range():
    s = _disk_sample()
    h = radial_histogram(s, 20, 0.5)
    assert h.mass == pytest.approx(0.25, abs=0.03)
    assert h.metadata["beyond_fraction"] == pytest.approx(0.75, abs=0.03)


def test_histogram_requires_bins_and_range():
    s = _disk_sample(200)
    with pytest.raises(ParameterError):
        radial_histogram(s, 5, 1.0)
    with pytest.raises(ParameterError):
        real_histogram(s, 20, 1.0, 1.0)


def test_grid_histogram_integrates_to_one():
    s = _disk_sample()
    g = grid_histogram(s, 30, (-1.0, 1.0, -1.0, 1.0))
    assert g.density.shape == (30, 30)
    assert g.integral() == pytest.approx(1.0)


def test_l1_of_curve_with_itself_is_zero():
    xs = np.linspace(0, 1, 50)
    c = curve_from_samples("radial", xs, 2 * xs)
    assert l1_distance(c, c) == 0.0
    other = curve_from_samples("radial", xs, np.ones_like(xs))
    assert l1_distance(c, other) == pytest.approx(0.5, abs=0.05)


def test_l1_grid_shape_mismatch():
    s = _disk_sample(500)
    a = grid_histogram(s, 10, (-1, 1, -1, 1))
    b = grid_histogram(s, 12, (-1, 1, -1, 1))
    with pytest.raises(ParameterError):
        l1_distance(a, b)


def test_rotational_asymmetry_of_disk_below_threshold():
    s = _disk_sample(8000)
    assert rotational_asymmetry(s, 16) < asymmetry_threshold(s, 16)


def test_rotational_asymmetry_detects_half_plane():
    s = _disk_sample(4000)
    half = SpectrumSample(np.abs(s.eigenvalues.real) + 1j * s.eigenvalues.imag, s.n, s.t_len, 1, 1)
    assert rotational_asymmetry(half, 16) > asymmetry_threshold(half, 16)
    with pytest.raises(ParameterError):
        rotational_asymmetry(half, 2)


def test_borderline_occupancy():
    s = _disk_sample()
    outside, hole = borderline_occupancy(s, math.sqrt(0.5), 0.5)
    assert outside == pytest.approx(0.5, abs=0.03)
    assert hole == pytest.approx(0.25, abs=0.03)
    with pytest.raises(ParameterError):
        borderline_occupancy(s, 0.5, 0.6)


def test_eig_hermitian_sorted_real():
    m = np.array([[2.0, 1j], [-1j, 2.0]])
    assert np.allclose(eig_hermitian(m), [1.0, 3.0])
    assert np.allclose(eig_hermitian(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])
