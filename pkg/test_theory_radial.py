import math

import numpy as np
import pytest

from src.errors import ParameterError
from src.theory import (
    borderline_radii_generalC,
    diag_a_radii,
    ewma_transform,
    exponential_kernel_transform,
    identity_transform,
    ntransform_crosscheck,
    power_law_transform,
    rot_master_solve_diagA,
    rot_master_solve_generalC,
    sectors_transform,
    squared_transform,
    student_transform,
    student_v1_density_curve,
    student_v1_radial_density,
    tm1_real_part_density,
    tm1_tlce_density_curve,
    tm1_tlce_radial_density,
    tm1_tlce_radii,
    tm2a_internal_radius,
    tm2b_internal_radius,
    wrong_multiplication_law_solve,
)
from src.theory.radial import general_c_problem, radial_density_curve, wrong_law_radius
from src.theory.tm1 import tm1_tlce_solution


def test_tm1_radii():
    assert tm1_tlce_radii(0.5) == pytest.approx((math.sqrt(0.75), 0.0))
    r_ext, r_int = tm1_tlce_radii(2.0)
    assert r_ext == pytest.approx(math.sqrt(6.0))
    assert r_int == pytest.approx(math.sqrt(0.5))
    assert tm1_tlce_radii(0.5, sigma=2.0)[0] == pytest.approx(4.0 * math.sqrt(0.75))


def test_tm1_density_mass():
    assert tm1_tlce_density_curve(0.5).integral() == pytest.approx(1.0, abs=2e-2)
    # continuous mass 1/r once zero modes appear
    assert tm1_tlce_density_curve(2.0).integral() == pytest.approx(0.5, abs=3e-2)


def test_tm1_density_vanishes_off_support():
    r_ext, r_int = tm1_tlce_radii(2.0)
    assert tm1_tlce_radial_density(1.01 * r_ext, 2.0) == 0.0
    assert tm1_tlce_radial_density(0.5 * r_int, 2.0) == 0.0
    assert tm1_tlce_radial_density(0.5 * (r_int + r_ext), 2.0) > 0.0


def test_tm1_solution_limits():
    r_ext, _ = tm1_tlce_radii(0.5)
    assert tm1_tlce_solution(1.1 * r_ext, 0.5) == (0.0, 0.0)
    M, m = tm1_tlce_solution(0.5 * r_ext, 0.5)
    assert -1.0 < M < 0.0
    assert m != 0.0


def test_real_part_density_symmetric_with_unit_mass():
    xs = np.linspace(-4.0, 4.0, 800)
    rho = tm1_real_part_density(xs, 0.5)
    assert np.all(rho >= 0)
    assert np.max(np.abs(rho - rho[::-1])) < 1e-4
    assert float(np.sum(rho) * (xs[1] - xs[0])) == pytest.approx(1.0, abs=5e-2)


def test_transform_first_moment_at_large_z():
    z = 1e5j
    for m in (
        identity_transform(2.0),
        sectors_transform([1.0, 5.0], [0.5, 0.5]),
        ewma_transform(1.5),
        student_transform(6.0, 2.0),
        exponential_kernel_transform(1.0, 3.0),
    ):
        assert (z * m(z)).real == pytest.approx(m.m1, rel=1e-3)


def test_power_law_transform_has_unit_mean():
    m = power_law_transform(0.35)
    assert (1e6j * m(1e6j)).real == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ParameterError):
        power_law_transform(0.6)


def test_squared_transform_moments():
    m = sectors_transform([1.0, 3.0], [0.25, 0.75])
    sq = squared_transform(m)
    assert sq.m1 == pytest.approx(m.m2)
    z = 40.0 + 1.0j
    assert sq(z) == pytest.approx(0.25 * 1.0 / (z - 1.0) + 0.75 * 9.0 / (z - 9.0))


def test_inverse_negative():
    m = identity_transform()
    assert m.inverse_negative(-0.5) == pytest.approx(-1.0)
    with pytest.raises(ParameterError):
        m.inverse_negative(0.5)


def test_general_c_radii_reduce_to_identity():
    for r in (0.5, 2.0):
        assert borderline_radii_generalC(identity_transform(), r) == pytest.approx(tm1_tlce_radii(r))
    with pytest.raises(ParameterError):
        borderline_radii_generalC(identity_transform(), 0.0)


def test_sector_internal_radius_closed_form():
    assert tm2a_internal_radius([1.0, 1.0], [0.5, 0.5], 2.0) == pytest.approx(tm1_tlce_radii(2.0)[1])
    general = borderline_radii_generalC(sectors_transform([1.0, 5.0], [0.5, 0.5]), 2.0)[1]
    assert tm2a_internal_radius([1.0, 5.0], [0.5, 0.5], 2.0) == pytest.approx(general, rel=1e-6)
    assert tm2a_internal_radius([1.0, 5.0], [0.5, 0.5], 0.5) == 0.0


def test_power_law_internal_radius_matches_general_route():
    general = borderline_radii_generalC(power_law_transform(0.35), 2.0)[1]
    assert tm2b_internal_radius(0.35, 2.0) == pytest.approx(general, rel=1e-3)
    assert tm2b_internal_radius(0.35, 0.5) == 0.0


def test_diag_a_radii_identity():
    for r in (0.5, 2.0):
        assert diag_a_radii(identity_transform(), r) == pytest.approx(tm1_tlce_radii(r))


def test_diag_a_internal_radius_needs_negative_moments():
    with pytest.raises(ParameterError):
        diag_a_radii(exponential_kernel_transform(1.0, 2.0), 2.0)


def test_general_c_solution_matches_cubic():
    r = 0.5
    r_ext, _ = tm1_tlce_radii(r)
    for R in (0.3 * r_ext, 0.7 * r_ext):
        M, _ = rot_master_solve_generalC(identity_transform(), r, R)
        assert M == pytest.approx(tm1_tlce_solution(R, r)[0], abs=1e-6)


def test_wrong_law_coincides_for_identity():
    r = 0.5
    sq = squared_transform(identity_transform())
    assert wrong_law_radius(sq, r) == pytest.approx(tm1_tlce_radii(r)[0])
    r_ext, _ = tm1_tlce_radii(r)
    for R in (0.2 * r_ext, 0.6 * r_ext):
        assert wrong_multiplication_law_solve(sq, r, R) == pytest.approx(tm1_tlce_solution(R, r)[0], abs=1e-6)


def test_wrong_law_differs_for_sectors():
    r = 0.5
    m = sectors_transform([1.0, 5.0], [0.5, 0.5])
    correct, _ = borderline_radii_generalC(m, r)
    wrong = wrong_law_radius(squared_transform(m), r)
    assert abs(wrong - correct) > 1e-4
    R = 0.5 * correct
    M_correct, _ = rot_master_solve_generalC(m, r, R)
    assert abs(wrong_multiplication_law_solve(squared_transform(m), r, R) - M_correct) > 1e-4


def test_ntransform_crosscheck_small():
    m = sectors_transform([1.0, 5.0], [0.5, 0.5])
    r_ext, _ = borderline_radii_generalC(m, 0.5)
    assert ntransform_crosscheck(m, 0.5, 0.5 * r_ext) < 1e-5


def test_student_v1_approaches_gaussian_for_large_mu():
    mu = 400.0
    curve = student_v1_density_curve(0.5, mu, math.sqrt(mu - 2.0), nbins=60)
    assert curve.metadata["r_trunc"] > tm1_tlce_radii(0.5)[0]
    R = 0.5 * tm1_tlce_radii(0.5)[0]
    assert float(curve.at(R)) == pytest.approx(tm1_tlce_radial_density(R, 0.5), rel=0.1)


def test_student_v1_mass():
    rs = np.linspace(0.0, 10.0, 401)
    rho = student_v1_radial_density(rs, 0.5, 5.0, math.sqrt(5.0))
    assert float(np.sum(rho) * (rs[1] - rs[0])) == pytest.approx(1.0, abs=5e-2)


def test_diag_a_identity_matches_tm1():
    r = 0.5
    r_ext, r_int = tm1_tlce_radii(r)
    for R in (0.3 * r_ext, 0.7 * r_ext):
        M, m = rot_master_solve_diagA(identity_transform(), r, R)
        M1, m1 = tm1_tlce_solution(R, r)
        assert M == pytest.approx(M1, abs=1e-6)
        assert abs(m) == pytest.approx(abs(m1), abs=1e-6)
    assert rot_master_solve_diagA(identity_transform(), r, 1.1 * r_ext) == (0.0, 0.0)


def test_power_law_solution_between_radii_above_unit_ratio():
    r = 2.0
    m = power_law_transform(0.35)
    r_ext, r_int = borderline_radii_generalC(m, r)
    assert math.isinf(r_ext)
    assert r_int == pytest.approx(0.486, abs=5e-3)
    values = [rot_master_solve_generalC(m, r, R)[0] for R in (1.001 * r_int, 1.0, 2.0)]
    assert all(-1.0 / r < M < 0.0 for M in values)
    assert values[0] == pytest.approx(-1.0 / r, abs=2e-2)
    assert values[0] < values[1] < values[2]
    assert rot_master_solve_generalC(m, r, r_int)[0] == pytest.approx(-1.0 / r)


def test_power_law_radial_mass_above_unit_ratio():
    curve = radial_density_curve(general_c_problem(power_law_transform(0.35), 2.0))
    assert curve.edges[0] == pytest.approx(curve.metadata["r_int"])
    assert np.all(np.diff(curve.edges) > 0)
    assert np.all(curve.density >= 0)
    assert curve.mass == pytest.approx(0.5, rel=2e-2)
