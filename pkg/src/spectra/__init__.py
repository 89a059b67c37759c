"""Eigenvalue extraction, empirical densities and Monte Carlo spectra."""
from src.spectra.density import (
    DensityCurve,
    asymmetry_threshold,
    borderline_occupancy,
    curve_from_samples,
    grid_histogram,
    l1_distance,
    radial_histogram,
    real_histogram,
    rotational_asymmetry,
)
from src.spectra.eigen import (
    SpectrumSample,
    eig_general,
    eig_hermitian,
    zero_mode_fraction,
    zero_modes_per_iteration,
)
from src.spectra.montecarlo import default_threads, run_monte_carlo, spectrum_summary

__all__ = [
    "DensityCurve",
    "SpectrumSample",
    "asymmetry_threshold",
    "borderline_occupancy",
    "curve_from_samples",
    "default_threads",
    "eig_general",
    "eig_hermitian",
    "grid_histogram",
    "l1_distance",
    "radial_histogram",
    "real_histogram",
    "rotational_asymmetry",
    "run_monte_carlo",
    "spectrum_summary",
    "zero_mode_fraction",
    "zero_modes_per_iteration",
]
