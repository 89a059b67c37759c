"""Spectra - Monte Carlo and theoretical spectra of time-lagged covariance estimators"""
__version__ = "0.1.0"
