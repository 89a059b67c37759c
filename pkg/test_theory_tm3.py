import numpy as np
import pytest

from src.errors import GridMissError, ParameterError
from src.theory import (
    critical_ratio,
    etce_density,
    exponential_kernel_transform,
    tm3_borderline_grid,
    tm3_borderline_t1,
    tm3_density_grid,
    tm3_etce_density,
    tm3_etce_edges,
    tm3_solve_lattice,
    tm3_tlce_F,
)
from src.theory.tm3 import tm3_etce_green


def test_critical_ratio():
    assert critical_ratio(5.0) == pytest.approx(0.59869, abs=1e-5)
    assert critical_ratio(1e-3) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        critical_ratio(0.0)


def test_etce_edges_bracket_unit_mass():
    lo, hi = tm3_etce_edges(0.1, 1.0, 2.5)
    assert 0 < lo < hi
    xs = np.linspace(lo, hi, 4001)
    rho = tm3_etce_density(xs, 0.1, 1.0, 2.5)
    assert float(np.sum(rho) * (xs[1] - xs[0])) == pytest.approx(1.0, abs=2e-2)
    outside = tm3_etce_density(np.array([0.5 * lo, 1.5 * hi]), 0.1, 1.0, 2.5)
    assert np.all(outside == 0.0)


def test_etce_green_is_physical_branch():
    lo, hi = tm3_etce_edges(0.5, 1.0, 5.0)
    xs = np.linspace(lo, hi, 41)[1:-1]
    G = tm3_etce_green(xs + 1e-7j, 0.5, 1.0, 5.0)
    assert np.all(G.imag < 0)
    far = np.array([1e3 + 1.0j, -1e3 + 1.0j, 5e2j])
    assert np.allclose(far * tm3_etce_green(far, 0.5, 1.0, 5.0), 1.0, atol=1e-2)
    below = tm3_etce_green(np.array([2.0 - 0.5j]), 0.5, 1.0, 5.0)
    above = tm3_etce_green(np.array([2.0 + 0.5j]), 0.5, 1.0, 5.0)
    assert below == pytest.approx(np.conj(above))


def test_etce_mass_at_wide_ratio():
    lo, hi = tm3_etce_edges(0.5, 1.0, 5.0)
    xs = np.linspace(lo, hi, 8001)
    rho = tm3_etce_density(xs, 0.5, 1.0, 5.0)
    assert float(np.sum(rho) * (xs[1] - xs[0])) == pytest.approx(1.0, abs=2e-2)


def test_etce_edges_scale_with_sigma():
    lo, hi = tm3_etce_edges(0.1, 1.0, 2.5)
    assert tm3_etce_edges(0.1, 2.0, 2.5) == pytest.approx((4.0 * lo, 4.0 * hi))


def test_etce_quartic_agrees_with_temporal_prior_route():
    lo, hi = tm3_etce_edges(0.1, 1.0, 2.5)
    xs = np.linspace(lo, hi, 9)[1:-1]
    quartic = tm3_etce_density(xs, 0.1, 1.0, 2.5)
    general = etce_density(None, 0.1, xs, exponential_kernel_transform(1.0, 2.5))
    assert np.max(np.abs(quartic - general)) < 2e-3


def test_master_pair_at_interior_point():
    f1, f2 = tm3_tlce_F(0.5 + 0.5j, 0.0, 0.3, 1.0, 5.0, 1)
    assert np.isfinite(f1) and np.isfinite(f2)
    with pytest.raises(ParameterError):
        tm3_tlce_F(0.5 + 0.5j, -1.0, 0.3, 1.0, 5.0, 1)


def test_t1_borderline_without_hole():
    border = tm3_borderline_t1(0.3, 1.0, 5.0)
    assert border.kind == "parametric_curve"
    assert not border.metadata["has_hole"]
    assert border.points.size > 0
    assert np.all(border.branch == 0)
    assert len(border.metadata["crossings_x"]) >= 2
    pts = np.sort_complex(border.points)
    assert np.allclose(pts, np.sort_complex(np.conj(border.points)))


def test_t1_external_curve_spans_real_crossings():
    border = tm3_borderline_t1(0.3, 1.0, 5.0)
    ext = border.points[border.branch == 0]
    x_max = max(border.metadata["crossings_x"])
    assert x_max > 5.0
    assert np.abs(ext).max() == pytest.approx(x_max, rel=0.1)
    assert np.isclose(ext.real, x_max).any()
    assert border.metadata["f1_residual"] < 1e-6
    g = border.metadata["g_points"]
    assert np.all(g.imag >= 0)
    assert g[0].real == pytest.approx(max(border.metadata["crossings_X"]))
    assert g[-1].real == pytest.approx(min(border.metadata["crossings_X"]))


def test_t1_borderline_opens_hole_above_critical_ratio():
    border = tm3_borderline_t1(0.8, 1.0, 5.0)
    assert border.metadata["r_c"] == pytest.approx(critical_ratio(5.0))
    assert border.metadata["has_hole"]
    assert np.any(border.branch == 1)
    inner = np.abs(border.points[border.branch == 1]).max()
    outer = np.abs(border.points[border.branch == 0]).max()
    assert inner < outer


def test_t1_borderline_ratio_range():
    with pytest.raises(ParameterError):
        tm3_borderline_t1(1.5, 1.0, 5.0)


def test_grid_trace_follows_closed_form_external_curve():
    exact = tm3_borderline_t1(0.3, 1.0, 5.0, points=400)
    grid = tm3_borderline_grid(0.3, 1.0, 5.0, 1, resolution=81)
    assert grid.kind == "grid_trace"
    assert grid.metadata["components"] >= 1
    curve = exact.metadata["g_points"]
    curve = np.concatenate([curve, np.conj(curve)])
    gap = np.abs(grid.metadata["g_points"][:, None] - curve[None, :]).min(axis=1)
    assert np.median(gap) < max(grid.metadata["cell"])
    assert np.abs(grid.points).max() <= 1.05 * np.abs(exact.points).max()


def test_grid_trace_misses_outside_domain():
    with pytest.raises(GridMissError):
        tm3_borderline_grid(0.3, 1.0, 5.0, 1, bounds=(40.0, 50.0, 40.0, 50.0), resolution=11)


def test_grid_arguments_validated():
    with pytest.raises(ParameterError):
        tm3_borderline_grid(0.3, 1.0, 5.0, 0)
    with pytest.raises(ParameterError):
        tm3_solve_lattice(0.3, 1.0, 5.0, 1, resolution=3)


def test_lattice_has_at_most_two_roots():
    sol = tm3_solve_lattice(0.3, 1.0, 5.0, 2, resolution=31)
    assert sol.counts.max() <= 2
    assert sol.g.shape == (31, 31)


def test_density_grid_mass():
    curve = tm3_density_grid(0.3, 1.0, 5.0, 1, resolution=81, refine=3, nbins=40)
    assert curve.kind == "grid2d"
    assert np.all(curve.density >= 0)
    assert curve.mass == pytest.approx(1.0, abs=5e-2)


def test_lattice_root_inside_borderline_sits_on_upper_sheet():
    sol = tm3_solve_lattice(0.3, 1.0, 5.0, 1, bounds=(-0.5, 0.5, -0.5, 0.5), resolution=11)
    # G = -0.2 lies inside the h = 0 loop: a single root, beyond 10 (|G|^2 + 1)
    assert sol.counts[5, 3] == 1
    assert np.isnan(sol.sheets[5, 3, 0])
    assert sol.sheets[5, 3, 1] > 10.0 * (0.2 ** 2 + 1.0)
    assert np.isfinite(sol.z[5, 3, 1])
