import math

import numpy as np
import pytest

from src.errors import (
    ContourPinchError,
    MultipleRealRootsError,
    NoBracketError,
    ParameterError,
    SolverDivergedError,
    ZeroPolynomialError,
)
from src.numerics import (
    Polynomial,
    bracket_root,
    classify_roots,
    complex_newton,
    from_descending,
    polish_root,
    poly_roots,
    poly_roots_batch,
    real_roots,
    scan_brackets,
    simple_residue_sums,
    solve_depressed_cubic_unique_real,
    solve_real_pair,
    solve_real_system,
    special_erfc,
    special_log_gamma,
    trapezoid_contour_integral,
    unit_circle_residue_integral,
)


def test_poly_roots_quadratic():
    # z^2 - 3z + 2
    roots = sorted(poly_roots(Polynomial.from_coeffs([2, -3, 1])).as_array().real)
    assert roots == pytest.approx([1.0, 2.0], abs=1e-12)


def test_poly_roots_complex_pair():
    roots = poly_roots(Polynomial.from_coeffs([1, 0, 1])).as_array()
    assert sorted(roots.imag) == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert np.allclose(roots.real, 0.0, atol=1e-12)


def test_poly_roots_double_root_multiplicity():
    roots = poly_roots(Polynomial.from_coeffs([1, -2, 1])).as_array()
    assert len(roots) == 2
    assert np.allclose(roots, 1.0, atol=1e-6)


def test_vieta_residual_small():
    p = Polynomial.from_coeffs([2.0, -3.0, 0.5, 1.0])
    assert poly_roots(p).vieta_residual(p) < 1e-10


def test_zero_polynomial_raises():
    with pytest.raises(ZeroPolynomialError):
        poly_roots(Polynomial.from_coeffs([0, 0, 0]))


def test_constant_polynomial_raises():
    with pytest.raises(ParameterError):
        poly_roots(Polynomial.from_coeffs([3.0]))


def test_leading_zeros_trimmed():
    p = Polynomial.from_coeffs([1, 1, 0, 0])
    assert p.degree == 1


def test_from_descending_matches_ascending():
    p = from_descending([1, -3, 2])
    assert p.coeffs == Polynomial.from_coeffs([2, -3, 1]).coeffs


def test_real_roots_filters_complex():
    # (z - 1)(z^2 + 1)
    p = Polynomial.from_coeffs([-1, 1, -1, 1])
    assert real_roots(p) == pytest.approx([1.0])


def test_poly_roots_batch_matches_single():
    coeffs = np.array([[2, -3, 1], [1, 0, 1]], dtype=complex)
    batch = poly_roots_batch(coeffs)
    for row, c in zip(batch, coeffs):
        single = poly_roots(Polynomial.from_coeffs(c)).as_array()
        gap = np.abs(row[:, None] - single[None, :])
        assert gap.shape == (2, 2)
        assert np.all(gap.min(axis=1) < 1e-10)
        assert np.all(gap.min(axis=0) < 1e-10)


def test_poly_roots_batch_zero_leading_raises():
    with pytest.raises(ZeroPolynomialError):
        poly_roots_batch(np.array([[1.0, 2.0, 0.0]]))


def test_depressed_cubic_unique_real():
    # t^3 + t - 2 = (t - 1)(t^2 + t + 2)
    assert solve_depressed_cubic_unique_real(1.0, -2.0) == pytest.approx(1.0, abs=1e-12)


def test_depressed_cubic_three_real_raises():
    with pytest.raises(MultipleRealRootsError):
        solve_depressed_cubic_unique_real(-3.0, 0.0)


def test_classify_roots_inside_outside():
    mask = classify_roots(np.array([0.5, 2.0, 0.3j]))
    assert mask.tolist() == [True, False, True]


def test_classify_roots_pinch_raises():
    with pytest.raises(ContourPinchError):
        classify_roots(np.array([0.5, 1.0 + 1e-12]))


def test_residue_integral_simple_pole():
    # 1 / (u - 0.5): residue 1
    val = unit_circle_residue_integral(Polynomial.from_coeffs([1.0]), Polynomial.from_coeffs([-0.5, 1.0]))
    assert val == pytest.approx(1.0)


def test_residue_integral_pole_outside_is_zero():
    val = unit_circle_residue_integral(Polynomial.from_coeffs([1.0]), Polynomial.from_coeffs([-2.0, 1.0]))
    assert abs(val) < 1e-14


def test_residue_integral_double_pole():
    # u^2 / (u - 0.3)^2: residue d/du u^2 at 0.3 = 0.6
    val = unit_circle_residue_integral(Polynomial.from_coeffs([0, 0, 1.0]), Polynomial.from_coeffs([0.09, -0.6, 1.0]))
    assert val == pytest.approx(0.6, abs=1e-8)


def test_residue_matches_trapezoid():
    num = Polynomial.from_coeffs([0.0, 1.0])
    den = Polynomial.from_coeffs([0.1, -0.2, 3.0, 0.4])
    assert unit_circle_residue_integral(num, den) == pytest.approx(trapezoid_contour_integral(num, den), abs=1e-8)


def test_simple_residue_sums_vectorised():
    denoms = np.array([[-0.5, 1.0], [-0.25, 1.0]], dtype=complex)
    roots = np.array([[0.5], [0.25]], dtype=complex)
    inside = np.array([[True], [True]])
    numers = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
    out = simple_residue_sums(numers, denoms, roots, inside)
    assert out == pytest.approx(np.array([1.0, 0.25]))


def test_solve_real_system_circle_line():
    x = solve_real_system(lambda v: [v[0] ** 2 + v[1] ** 2 - 1.0, v[0] - v[1]], [1.0, 0.5])
    assert x == pytest.approx([math.sqrt(0.5), math.sqrt(0.5)], abs=1e-9)


def test_solve_real_pair():
    a, b = solve_real_pair(lambda x, y: (x + y - 3.0, x - y - 1.0), (0.0, 0.0))
    assert (a, b) == pytest.approx((2.0, 1.0), abs=1e-10)


def test_solve_real_system_no_descent_raises():
    with pytest.raises(SolverDivergedError):
        solve_real_system(lambda v: [v[0] ** 2 + 1.0], [0.0], max_iter=20)


def test_complex_newton_sqrt():
    z = complex_newton(lambda w: w * w + 4.0, 0.5 + 1.0j)
    assert z == pytest.approx(2.0j, abs=1e-10)


def test_bracket_root_and_no_bracket():
    assert bracket_root(math.cos, 1.0, 2.0) == pytest.approx(math.pi / 2)
    with pytest.raises(NoBracketError):
        bracket_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_scan_brackets_finds_sign_changes():
    pairs = scan_brackets(math.sin, np.linspace(0.5, 7.0, 40))
    assert len(pairs) == 2
    assert pairs[0][0] < math.pi < pairs[0][1]


def test_special_erfc_saturates():
    assert special_erfc(0.0) == pytest.approx(1.0)
    assert special_erfc(30.0) == 0.0
    assert special_erfc(-30.0) == 2.0


def test_special_log_gamma():
    assert special_log_gamma(5.0) == pytest.approx(math.log(24.0))
    with pytest.raises(ParameterError):
        special_log_gamma(0.0)


def test_polish_root_moves_towards_root():
    p = from_descending([1, -5, 6])
    polished = polish_root(p, 2.01)
    assert abs(polished - 2.0) < 1e-8
    assert polish_root(p, 3.0) == 3.0
