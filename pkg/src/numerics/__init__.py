"""Numeric kernel: polynomial roots, unit-circle residue integrals, nonlinear solvers, special functions."""
from src.numerics.contour import (
    classify_roots,
    simple_residue_sums,
    trapezoid_contour_integral,
    unit_circle_residue_integral,
)
from src.numerics.polynomial import (
    Polynomial,
    RootSet,
    from_descending,
    poly_roots,
    poly_roots_batch,
    polish_root,
    real_roots,
    solve_depressed_cubic_unique_real,
)
from src.numerics.solvers import (
    bracket_root,
    complex_newton,
    scan_brackets,
    solve_real_pair,
    solve_real_system,
)
from src.numerics.special import special_erfc, special_log_gamma

__all__ = [
    "Polynomial",
    "RootSet",
    "bracket_root",
    "classify_roots",
    "complex_newton",
    "from_descending",
    "poly_roots",
    "poly_roots_batch",
    "polish_root",
    "real_roots",
    "scan_brackets",
    "simple_residue_sums",
    "solve_depressed_cubic_unique_real",
    "solve_real_pair",
    "solve_real_system",
    "special_erfc",
    "special_log_gamma",
    "trapezoid_contour_integral",
    "unit_circle_residue_integral",
]
