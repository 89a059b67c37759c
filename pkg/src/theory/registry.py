"""
Theory Registry

Maps a (model, estimator, distribution) triple to the solver that produces its
theoretical spectrum. Pairs the theory does not cover raise UnsupportedTheoryError.

Usage:
    @TheoryRegistry.register("TM1", "TLCE")
    def tm1_tlce(request: TheoryRequest) -> TheoryCurve:
        ...

    curve = TheoryRegistry.create(TheoryRequest(model, estimator, distribution, r=0.5))
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution
from src.errors import ParameterError, UnsupportedTheoryError
from src.spectra.density import DensityCurve, curve_from_samples
from src.theory.heavy_tails import student_v1_density_curve, student_v2_density_curve
from src.theory.hermitian import etce_density, mp_density, mp_edges, tm4a_etce_density
from src.theory.levy import FreeLevyTlce, free_levy_etce_solve
from src.theory.radial import (
    borderline_radii_generalC,
    diag_a_problem,
    general_c_problem,
    radial_density_curve,
    wrong_law_density_curve,
    wrong_law_radius,
)
from src.theory.tm1 import tm1_tlce_density_curve, tm1_tlce_radii
from src.theory.tm3 import critical_ratio, tm3_borderline_t1, tm3_etce_curve
from src.theory.tm3_grid import tm3_borderline_grid, tm3_density_grid
from src.theory.transforms import ewma_transform, squared_transform, transform_for_model
from src.theory.types import Borderline, TheoryCurve

logger = logging.getLogger(__name__)

TheoryKey = Tuple[str, str, str]
Solver = Callable[["TheoryRequest"], TheoryCurve]

ETCE_EPSILON = 1e-6


@dataclass(frozen=True)
class TheoryRequest:
    """Everything a solver needs: the specs, r = N/T and the tabulation knobs.

    variant selects between alternative outputs of one triple: "wrong-law" for the
    sector TLCE, "t1" / "grid" / "density" for the exponential-kernel TLCE.
    """

    model: ModelSpec
    estimator: EstimatorSpec
    distribution: ReturnDistribution
    r: float
    points: int = 400
    nbins: int = 200
    variant: Optional[str] = None
    resolution: int = 121
    refine: int = 5
    epsilon: float = ETCE_EPSILON

    @property
    def key(self) -> TheoryKey:
        return (self.model.kind, self.estimator.kind, self.distribution.kind)


class TheoryRegistry:
    """Registry of theory solvers keyed by (model, estimator, distribution)."""

    _registry: Dict[TheoryKey, Solver] = {}

    @classmethod
    def register(cls, model: str, estimator: str, distribution: str = "Gaussian"):
        """Decorator registering a solver for one triple; duplicates are an error."""
        key = (model, estimator, distribution)

        def decorator(fn: Solver) -> Solver:
            if key in cls._registry:
                raise ValueError(f"Theory {key} already registered")
            cls._registry[key] = fn
            return fn

        return decorator

    @classmethod
    def supports(cls, model: str, estimator: str, distribution: str = "Gaussian") -> bool:
        return (model, estimator, distribution) in cls._registry

    @classmethod
    def list_theories(cls) -> List[TheoryKey]:
        return sorted(cls._registry)

    @classmethod
    def create(cls, request: TheoryRequest) -> TheoryCurve:
        """Run the solver registered for the request's triple.

        Raises:
            UnsupportedTheoryError: when no solver covers the triple.
        """
        if request.r <= 0:
            raise ParameterError(f"r must be positive, got {request.r}")
        solver = cls._registry.get(request.key)
        if solver is None:
            model, estimator, dist = request.key
            raise UnsupportedTheoryError(
                f"theory out of scope: {estimator} spectrum of {model} with {dist} returns remains to be developed"
            )
        logger.info("theory model=%s estimator=%s distribution=%s r=%.4g variant=%s", *request.key, request.r, request.variant)
        return solver(request)


def _rescale(curve: DensityCurve, s2: float) -> DensityCurve:
    """Eigenvalues scaled by s2: centers and edges stretch, densities shrink (1D curves)."""
    if s2 == 1.0:
        return curve
    edges = curve.edges * s2 if curve.edges is not None else None
    return replace(curve, centers=curve.centers * s2, density=curve.density / s2, edges=edges, metadata={**curve.metadata, "scaled_by": s2})


def _real_line(name: str, xs: np.ndarray, rho: np.ndarray, **meta) -> DensityCurve:
    return curve_from_samples("real_line", xs, rho, solver=name, **meta)


def _circles(r_ext: float, r_int: float) -> Borderline:
    return Borderline("circle_pair", r_ext=r_ext, r_int=r_int)


def _etce_range(request: TheoryRequest, top_variance: float) -> np.ndarray:
    hi = 1.5 * top_variance * (1.0 + math.sqrt(request.r)) ** 2
    return np.linspace(1e-3 * hi, hi, request.points)


@TheoryRegistry.register("TM1", "ETCE")
def tm1_etce(request: TheoryRequest) -> TheoryCurve:
    sigma = request.model.sigma
    lo, hi = mp_edges(request.r, sigma)
    xs = np.linspace(lo, hi, request.points)
    curve = _real_line("marchenko_pastur", xs, mp_density(xs, request.r, sigma), r=request.r, sigma=sigma)
    return TheoryCurve("tm1-etce", curve, values={"x_min": lo, "x_max": hi, "zero_mode_mass": max(0.0, 1.0 - 1.0 / request.r)})


@TheoryRegistry.register("TM1", "TLCE")
def tm1_tlce(request: TheoryRequest) -> TheoryCurve:
    sigma = request.model.sigma
    r_ext, r_int = tm1_tlce_radii(request.r, sigma)
    curve = tm1_tlce_density_curve(request.r, sigma, request.nbins)
    return TheoryCurve("tm1-tlce", curve, _circles(r_ext, r_int), {"r_ext": r_ext, "r_int": r_int})


@TheoryRegistry.register("TM1", "TLCE", "StudentV1")
def tm1_student_v1(request: TheoryRequest) -> TheoryCurve:
    d = request.distribution
    curve = _rescale(student_v1_density_curve(request.r, d.mu, d.scale, request.nbins), request.model.sigma ** 2)
    return TheoryCurve("student-v1", curve, values={"r_trunc": float(curve.edges[-1])})


@TheoryRegistry.register("TM1", "TLCE", "StudentV2")
def tm1_student_v2(request: TheoryRequest) -> TheoryCurve:
    d = request.distribution
    curve = _rescale(student_v2_density_curve(request.r, d.mu, d.scale, request.nbins), request.model.sigma ** 2)
    values = {"r_trunc": float(curve.edges[-1]), "r_ext": curve.metadata.get("r_ext"), "r_int": curve.metadata.get("r_int")}
    return TheoryCurve("student-v2", curve, values=values)


@TheoryRegistry.register("TM1", "TLCE", "FreeLevyProxy")
def tm1_free_levy_tlce(request: TheoryRequest) -> TheoryCurve:
    d = request.distribution
    curve = FreeLevyTlce(d.alpha, d.beta, d.gamma_range, request.r).density_curve(request.nbins)
    return TheoryCurve("free-levy-tlce", curve, values={"r_trunc": float(curve.edges[-1])})


@TheoryRegistry.register("TM1", "ETCE", "FreeLevyProxy")
def tm1_free_levy_etce(request: TheoryRequest) -> TheoryCurve:
    d = request.distribution
    xs = _etce_range(request, 4.0 * d.gamma_range)
    rho = np.empty(xs.size)
    for i, x in enumerate(xs):
        z = complex(x, request.epsilon)
        M = free_levy_etce_solve(d.alpha, d.beta, d.gamma_range, request.r, z)
        rho[i] = -((M + 1.0) / z).imag / math.pi
    curve = _real_line("free_levy_etce", xs, np.clip(rho, 0.0, None), alpha=d.alpha, gamma=d.gamma_range, r=request.r)
    return TheoryCurve("free-levy-etce", curve)


def _ewma(request: TheoryRequest):
    theta = request.estimator.ewma_theta
    if theta is None:
        raise ParameterError("weighted estimators need ewma_theta")
    return ewma_transform(theta)


@TheoryRegistry.register("TM1", "WeightedTLCE")
def tm1_weighted_tlce(request: TheoryRequest) -> TheoryCurve:
    problem = diag_a_problem(_ewma(request), request.r)
    curve = _rescale(radial_density_curve(problem, request.nbins), request.model.sigma ** 2)
    s2 = request.model.sigma ** 2
    return TheoryCurve("ewma-tlce", curve, _circles(problem.r_ext * s2, problem.r_int * s2), {"r_ext": problem.r_ext * s2, "r_int": problem.r_int * s2})


@TheoryRegistry.register("TM1", "WeightedETCE")
def tm1_weighted_etce(request: TheoryRequest) -> TheoryCurve:
    mA = _ewma(request)
    s2 = request.model.sigma ** 2
    xs = _etce_range(request, mA.params.get("lambda1", 1.0))
    rho = etce_density(None, request.r, xs, mA, request.epsilon)
    curve = _rescale(_real_line("ewma_etce", xs, rho, theta=request.estimator.ewma_theta, r=request.r), s2)
    return TheoryCurve("ewma-etce", curve)


@TheoryRegistry.register("TM2a", "ETCE")
def tm2a_etce(request: TheoryRequest) -> TheoryCurve:
    mC = transform_for_model(request.model)
    xs = _etce_range(request, max(request.model.variances))
    curve = _real_line("sectors_etce", xs, etce_density(mC, request.r, xs, epsilon=request.epsilon), r=request.r)
    return TheoryCurve("tm2a-etce", curve)


def _general_c_tlce(request: TheoryRequest, name: str) -> TheoryCurve:
    mC = transform_for_model(request.model)
    if request.variant == "wrong-law":
        r_ext = wrong_law_radius(squared_transform(mC), request.r)
        curve = wrong_law_density_curve(squared_transform(mC), request.r, request.nbins)
        return TheoryCurve(f"{name}-wrong-law", curve, _circles(r_ext, 0.0), {"r_ext": r_ext})
    r_ext, r_int = borderline_radii_generalC(mC, request.r)
    curve = radial_density_curve(general_c_problem(mC, request.r, (r_ext, r_int)), request.nbins)
    return TheoryCurve(name, curve, _circles(r_ext, r_int), {"r_ext": r_ext, "r_int": r_int})


@TheoryRegistry.register("TM2a", "TLCE")
def tm2a_tlce(request: TheoryRequest) -> TheoryCurve:
    return _general_c_tlce(request, "tm2a-tlce")


@TheoryRegistry.register("TM2b", "ETCE")
def tm2b_etce(request: TheoryRequest) -> TheoryCurve:
    mC = transform_for_model(request.model)
    xs = _etce_range(request, 4.0)
    curve = _real_line("power_law_etce", xs, etce_density(mC, request.r, xs, epsilon=request.epsilon), r=request.r)
    return TheoryCurve("tm2b-etce", curve)


@TheoryRegistry.register("TM2b", "TLCE")
def tm2b_tlce(request: TheoryRequest) -> TheoryCurve:
    return _general_c_tlce(request, "tm2b-tlce")


@TheoryRegistry.register("TM3", "ETCE")
def tm3_etce(request: TheoryRequest) -> TheoryCurve:
    m = request.model
    curve = tm3_etce_curve(request.r, m.sigma, m.tau, request.points)
    return TheoryCurve("tm3-etce", curve, values={"x_min": curve.metadata["x_min"], "x_max": curve.metadata["x_max"]})


@TheoryRegistry.register("TM3", "TLCE")
def tm3_tlce(request: TheoryRequest) -> TheoryCurve:
    m = request.model
    t = request.estimator.lag
    if t < 1:
        raise ParameterError(f"the exponential-kernel TLCE needs lag t >= 1, got {t}")
    variant = request.variant or ("t1" if t == 1 and 0 < request.r < 1 else "grid")
    if variant not in ("t1", "grid", "density"):
        raise ParameterError(f"unknown TM3 TLCE variant {variant!r}; expected t1, grid or density")
    values = {"r_c": critical_ratio(m.tau)}
    if variant == "t1":
        if t != 1:
            raise ParameterError(f"the closed-form borderline exists for t = 1 only, got t={t}")
        border = tm3_borderline_t1(request.r, m.sigma, m.tau)
        values["crossings_x"] = border.metadata["crossings_x"]
        return TheoryCurve("tm3-borders-t1", borderline=border, values=values)
    border = tm3_borderline_grid(request.r, m.sigma, m.tau, t, resolution=request.resolution)
    values["components"] = border.metadata["components"]
    if variant == "grid":
        return TheoryCurve("tm3-border-grid", borderline=border, values=values)
    curve = tm3_density_grid(request.r, m.sigma, m.tau, t, resolution=request.resolution, refine=request.refine)
    values["mass"] = curve.mass
    return TheoryCurve("tm3-density-grid", curve, border, values)


@TheoryRegistry.register("TM4a", "ETCE")
def tm4a_etce(request: TheoryRequest) -> TheoryCurve:
    m = request.model
    top = max(m.variances) / math.tanh(0.5 / m.tau)
    xs = _etce_range(request, top)
    rho = tm4a_etce_density(xs, m.variances, m.weights, m.tau, request.r, request.epsilon)
    return TheoryCurve("tm4a-etce", _real_line("tm4a_etce", xs, rho, r=request.r, tau=m.tau))
