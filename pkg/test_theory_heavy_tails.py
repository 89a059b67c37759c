import math

import numpy as np
import pytest

from src.errors import EmptyWindowError, ParameterError, UnsupportedTheoryError
from src.spectra import curve_from_samples
from src.theory import (
    FreeLevyTlce,
    abel_falsify,
    abel_forward,
    abel_inverse,
    erfc_form_factor,
    fit_q,
    form_factor_curve,
    free_levy_etce_solve,
    free_levy_tlce_solve,
    mp_green,
    reference_densities,
    tm1_tlce_density_curve,
    tm1_tlce_radii,
)
from src.theory.tm1 import tm1_tlce_solution


def test_gaussian_levy_matches_cubic():
    r = 0.5
    R = 0.4
    M, m, delta = free_levy_tlce_solve(2.0, 0.0, 1.0, r, R)
    assert M == pytest.approx(tm1_tlce_solution(R, r)[0], abs=1e-6)
    assert delta == 0j


def test_gaussian_levy_curve_delegates_to_cubic():
    curve = FreeLevyTlce(2.0, 0.0, 1.0, 0.5).density_curve(50)
    assert curve.integral() == pytest.approx(1.0, abs=3e-2)
    assert curve.metadata["solver"] == "free_levy"


def test_levy_radial_solution_increases_outward():
    system = FreeLevyTlce(1.5, 0.0, 1.0, 0.5)
    states = system.sweep(np.array([0.2, 0.5, 1.0, 2.0]))
    M = states[:, 0]
    assert np.all(M < 0) and np.all(M > system.m_lo)
    assert np.all(np.diff(M) > 0)


def test_levy_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        FreeLevyTlce(2.5, 0.0, 1.0, 0.5)


def test_gaussian_levy_etce_is_marchenko_pastur():
    z = 1.0 + 0.01j
    M = free_levy_etce_solve(2.0, 0.0, 1.0, 0.25, z)
    assert M == pytest.approx(z * mp_green(z, 0.25) - 1.0, abs=1e-6)


def test_skewed_levy_etce_out_of_scope():
    with pytest.raises(UnsupportedTheoryError):
        free_levy_etce_solve(1.5, 0.5, 1.0, 0.5, 1.0 + 0.1j)


def test_abel_forward_of_uniform_disk():
    xs = np.array([0.0, 0.3, 0.7])
    out = abel_forward(lambda R: 2.0 * R, 1.0, xs)
    assert out == pytest.approx(2.0 / math.pi * np.sqrt(1.0 - xs ** 2), abs=1e-8)


def test_abel_inverse_recovers_uniform_disk():
    f = lambda x: 2.0 / math.pi * math.sqrt(max(0.0, 1.0 - x * x))
    df = lambda x: -2.0 / math.pi * x / math.sqrt(1.0 - x * x)
    out = abel_inverse(f, np.array([0.3, 0.5]), 1.0, derivative=df)
    assert out == pytest.approx([0.6, 1.0], abs=1e-6)


def test_abel_relation_fails_for_tlce_but_not_control():
    result = abel_falsify(0.5, points=21)
    assert result.control_discrepancy < 1e-4
    assert result.max_discrepancy > 1e-3
    with pytest.raises(ParameterError):
        abel_falsify(2.0)


def test_reference_densities_unit_mass():
    assert reference_densities("GUE").integral() == pytest.approx(1.0, abs=5e-3)
    assert reference_densities("GinUE").integral() == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ParameterError):
        reference_densities("GOE")


def test_erfc_form_factor_half_at_border():
    assert erfc_form_factor(0.5, 100, 1.0, 0.5, 1) == pytest.approx(0.5)
    assert erfc_form_factor(0.0, 100, 1.0, 0.5, 1) == pytest.approx(1.0)
    assert erfc_form_factor(0.0, 100, 1.0, 0.5, -1) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ParameterError):
        erfc_form_factor(0.5, 100, 1.0, 0.5, 0)
    with pytest.raises(ParameterError):
        erfc_form_factor(0.5, 0, 1.0, 0.5, 1)


def test_fit_q_recovers_synthetic_value():
    n = 400
    r_ext, _ = tm1_tlce_radii(0.5)
    theory = tm1_tlce_density_curve(0.5)
    centers = np.linspace(0.6 * r_ext, 1.3 * r_ext, 200)
    synthetic = form_factor_curve(theory, centers, n, 0.7, r_ext, 1)
    assert fit_q(synthetic, theory, r_ext, 1, n) == pytest.approx(0.7, rel=1e-3)


def test_fit_q_empty_window():
    theory = tm1_tlce_density_curve(0.5)
    far = curve_from_samples("radial", np.linspace(5.0, 6.0, 10), np.zeros(10))
    with pytest.raises(EmptyWindowError):
        fit_q(far, theory, tm1_tlce_radii(0.5)[0], 1, 10000)
