"""Student-t returns: common random volatility (version 1) and per-time volatility (version 2).

Version 1 mixes the Gaussian TLCE density over an inverse-gamma variance; version 2
is the diagonal-A radial master equation with the gamma prior on 1/variance.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy import stats
from scipy.integrate import quad

from src.errors import ParameterError
from src.numerics.special import special_log_gamma
from src.spectra.density import DensityCurve
from src.theory.radial import diag_a_problem, radial_density_curve
from src.theory.tm1 import tm1_tlce_radial_density, tm1_tlce_radii
from src.theory.transforms import student_transform

logger = logging.getLogger(__name__)

MASS_TAIL = 1e-4


def _check(mu: float, theta: float) -> None:
    if mu <= 0 or theta <= 0:
        raise ParameterError(f"Student parameters must be positive, got mu={mu}, theta={theta}")


def student_v1_radial_density(R, r: float, mu: float, theta: float):
    """rho_rad(R) = int rho_1(xi) xi^(mu/2) exp(-theta^2 xi / 2R) d xi * theta^mu / (2^(mu/2) Gamma(mu/2) R^(1 + mu/2)).

    rho_1 is the sigma = 1 Gaussian TLCE density; the support is unbounded.
    """
    _check(mu, theta)
    xi_ext, xi_int = tm1_tlce_radii(r, 1.0)
    k = 0.5 * mu
    log_pref = mu * math.log(theta) - k * math.log(2.0) - special_log_gamma(k)
    Rs = np.atleast_1d(np.asarray(R, dtype=float))
    out = np.zeros(Rs.size)
    for i, Rv in enumerate(Rs):
        if Rv <= 0:
            continue
        log_r = (1.0 + k) * math.log(Rv)

        def integrand(xi: float) -> float:
            rho = tm1_tlce_radial_density(xi, r)
            if rho <= 0:
                return 0.0
            return rho * math.exp(k * math.log(xi) - theta * theta * xi / (2.0 * Rv) + log_pref - log_r)

        points = [Rv] if xi_int < Rv < xi_ext else None
        out[i] = quad(integrand, xi_int, xi_ext, points=points, limit=200, epsabs=1e-12)[0]
    return float(out[0]) if np.ndim(R) == 0 else out


def student_v1_truncation_radius(r: float, mu: float, theta: float) -> float:
    """Radius beyond which at most a 1e-4 fraction of the continuous mass lies."""
    w_low = stats.gamma.ppf(MASS_TAIL, 0.5 * mu, scale=2.0 / theta ** 2)
    return tm1_tlce_radii(r, 1.0)[0] / w_low


def student_v1_density_curve(r: float, mu: float, theta: float, nbins: int = 200) -> DensityCurve:
    r_hi = student_v1_truncation_radius(r, mu, theta)
    edges = np.linspace(0.0, r_hi, nbins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    rho = student_v1_radial_density(centers, r, mu, theta)
    meta = {"solver": "student_v1", "r": r, "mu": mu, "theta": theta, "r_trunc": r_hi}
    logger.info("student_v1 r=%.4g mu=%.4g theta=%.4g r_trunc=%.6g", r, mu, theta, r_hi)
    return DensityCurve("radial", centers, rho, float(np.sum(rho * np.diff(edges))), edges=edges, metadata=meta)


def student_v2_density_curve(r: float, mu: float, theta: float, nbins: int = 200) -> DensityCurve:
    """Per-time random volatility: diagonal temporal prior with gamma-distributed 1/variance."""
    _check(mu, theta)
    curve = radial_density_curve(diag_a_problem(student_transform(mu, theta), r), nbins)
    curve.metadata.update({"solver": "student_v2", "mu": mu, "theta": theta})
    return curve
