"""Theoretical spectra: closed forms, master-equation solvers, borderlines and cross-checks."""
from src.theory.abel import AbelComparison, abel_derived_radial_curve, abel_falsify, abel_forward, abel_inverse
from src.theory.heavy_tails import student_v1_density_curve, student_v1_radial_density, student_v2_density_curve
from src.theory.hermitian import (
    case2_etce_solve,
    etce_density,
    mp_density,
    mp_edges,
    mp_green,
    tm2a_etce_polynomial,
    tm4a_etce_density,
    tm4a_etce_solve,
)
from src.theory.levy import FreeLevyTlce, free_levy_etce_solve, free_levy_tlce_solve
from src.theory.radial import (
    RadialProblem,
    borderline_radii_generalC,
    diag_a_radii,
    ntransform_crosscheck,
    radial_density_curve,
    rot_master_solve_diagA,
    rot_master_solve_generalC,
    tm2a_internal_radius,
    tm2b_internal_radius,
    wrong_multiplication_law_solve,
)
from src.theory.reference import erfc_form_factor, fit_q, form_factor_curve, reference_densities
from src.theory.registry import TheoryRegistry, TheoryRequest
from src.theory.tm1 import tm1_real_part_density, tm1_tlce_density_curve, tm1_tlce_radial_density, tm1_tlce_radii
from src.theory.tm3 import critical_ratio, tm3_borderline_t1, tm3_etce_density, tm3_etce_edges, tm3_tlce_F
from src.theory.tm3_grid import tm3_borderline_grid, tm3_density_grid, tm3_solve_lattice
from src.theory.transforms import (
    ewma_transform,
    exponential_kernel_transform,
    identity_transform,
    power_law_transform,
    sectors_transform,
    squared_transform,
    student_transform,
    transform_for_model,
)
from src.theory.types import Borderline, GridSolution, MTransform, TheoryCurve

__all__ = [
    "AbelComparison",
    "Borderline",
    "FreeLevyTlce",
    "GridSolution",
    "MTransform",
    "RadialProblem",
    "TheoryCurve",
    "TheoryRegistry",
    "TheoryRequest",
    "abel_derived_radial_curve",
    "abel_falsify",
    "abel_forward",
    "abel_inverse",
    "borderline_radii_generalC",
    "case2_etce_solve",
    "critical_ratio",
    "diag_a_radii",
    "erfc_form_factor",
    "etce_density",
    "ewma_transform",
    "exponential_kernel_transform",
    "fit_q",
    "form_factor_curve",
    "free_levy_etce_solve",
    "free_levy_tlce_solve",
    "identity_transform",
    "mp_density",
    "mp_edges",
    "mp_green",
    "ntransform_crosscheck",
    "power_law_transform",
    "radial_density_curve",
    "reference_densities",
    "rot_master_solve_diagA",
    "rot_master_solve_generalC",
    "sectors_transform",
    "squared_transform",
    "student_transform",
    "student_v1_density_curve",
    "student_v1_radial_density",
    "student_v2_density_curve",
    "tm1_real_part_density",
    "tm1_tlce_density_curve",
    "tm1_tlce_radial_density",
    "tm1_tlce_radii",
    "tm2a_etce_polynomial",
    "tm2a_internal_radius",
    "tm2b_internal_radius",
    "tm3_borderline_grid",
    "tm3_borderline_t1",
    "tm3_density_grid",
    "tm3_etce_density",
    "tm3_etce_edges",
    "tm3_solve_lattice",
    "tm3_tlce_F",
    "transform_for_model",
    "wrong_multiplication_law_solve",
]
