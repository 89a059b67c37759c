"""Figure pipelines at desk scale.

Each pipeline samples the Monte Carlo spectrum, evaluates the matching theory and
writes both side by side into the figure's run directory. `scale` multiplies the
matrix sizes and iteration counts; 1.0 runs in seconds to a few minutes.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from src.covariance.kernels import tm4c_true_eigenvalues
from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution
from src.runner.io import borderline_frame, curve_frame, curve_header, eigenvalue_frame, write_csv, write_json
from src.runner.manifest import RunContext
from src.spectra.density import DensityCurve, borderline_occupancy, grid_histogram, l1_distance, radial_histogram, real_histogram
from src.spectra.eigen import SpectrumSample, zero_mode_fraction
from src.spectra.montecarlo import run_monte_carlo
from src.theory.abel import abel_falsify
from src.theory.reference import fit_q
from src.theory.registry import TheoryRegistry, TheoryRequest
from src.theory.tm3_grid import tm3_density_grid as density_grid
from src.theory.types import TheoryCurve

logger = logging.getLogger(__name__)

FigureFn = Callable[[RunContext, float, int, Optional[int]], None]

GAUSSIAN = ReturnDistribution()
TLCE1 = EstimatorSpec(kind="TLCE", lag=1)
ETCE = EstimatorSpec(kind="ETCE")


def _size(base: int, scale: float, floor: int = 4) -> int:
    return max(floor, int(round(base * scale)))


def _tag(value: float) -> str:
    return f"{value:g}".replace(".", "p")


def _sample(
    ctx: RunContext,
    tag: str,
    model: ModelSpec,
    estimator: EstimatorSpec,
    n: int,
    t_len: int,
    iterations: int,
    seed: int,
    threads: Optional[int],
    dist: ReturnDistribution = GAUSSIAN,
) -> SpectrumSample:
    s = run_monte_carlo(model, dist, estimator, n, t_len, iterations, seed, threads)
    header = {"figure": ctx.name, "model": model.kind, "model_params": model.summary(), "estimator": estimator.kind, "lag": estimator.lag, "n": n, "t_len": t_len, "r": n / t_len, "iterations": iterations, "seed": seed, "distribution": dist.kind}
    ctx.add_artifact(write_csv(ctx.path(f"eigenvalues_{tag}.csv"), eigenvalue_frame(s), header))
    ctx.values[f"zero_mode_fraction_{tag}"] = zero_mode_fraction(s)
    return s


def _theory(ctx: RunContext, tag: str, model: ModelSpec, estimator: EstimatorSpec, r: float, dist: ReturnDistribution = GAUSSIAN, **knobs: Any) -> TheoryCurve:
    result = TheoryRegistry.create(TheoryRequest(model, estimator, dist, r, **knobs))
    header = {"figure": ctx.name, "model": model.kind, "model_params": model.summary(), "estimator": estimator.kind, "r": r, "theory": result.name}
    if result.curve is not None:
        _write_curve(ctx, f"theory_{tag}.csv", result.curve, header)
    if result.borderline is not None:
        ctx.add_artifact(write_csv(ctx.path(f"borderline_{tag}.csv"), borderline_frame(result.borderline), {**header, "borderline": result.borderline.kind}))
    for key, value in result.values.items():
        if np.isscalar(value):
            ctx.values[f"{key}_{tag}"] = value
    return result


def _write_curve(ctx: RunContext, filename: str, curve: DensityCurve, header: Dict[str, Any]) -> None:
    ctx.add_artifact(write_csv(ctx.path(filename), curve_frame(curve), {**header, **curve_header(curve)}))


def _compare(ctx: RunContext, tag: str, empirical: DensityCurve, theory: DensityCurve, window=None) -> float:
    _write_curve(ctx, f"empirical_{tag}.csv", empirical, {"figure": ctx.name})
    l1 = l1_distance(empirical, theory, window)
    ctx.values[f"l1_{tag}"] = l1
    logger.info("figure=%s panel=%s l1=%.5f", ctx.name, tag, l1)
    return l1


def _radial_panel(ctx: RunContext, tag: str, s: SpectrumSample, result: TheoryCurve, nbins: int = 100) -> None:
    r_ext = result.values.get("r_ext") or float(result.curve.edges[-1])
    emp = radial_histogram(s, nbins, 1.1 * r_ext)
    _compare(ctx, tag, emp, result.curve, (0.05 * r_ext, 0.95 * r_ext))
    if result.borderline is not None and result.borderline.kind == "circle_pair":
        outside, hole = borderline_occupancy(s, result.borderline.r_ext, result.borderline.r_int or 0.0)
        ctx.values[f"outside_fraction_{tag}"] = outside
        ctx.values[f"hole_fraction_{tag}"] = hole


def _real_panel(ctx: RunContext, tag: str, s: SpectrumSample, result: TheoryCurve, nbins: int = 80) -> None:
    c = result.curve
    support = c.centers[c.density > 0]
    hi = 1.1 * float(max(support.max(), s.eigenvalues.real.max()))
    emp = real_histogram(s, nbins, 0.0, hi)
    lo_s, hi_s = float(support.min()), float(support.max())
    pad = 0.05 * (hi_s - lo_s)
    _compare(ctx, tag, emp, c, (lo_s + pad, hi_s - pad))


def tm1_tlce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    n = _size(200, scale)
    for i, r in enumerate((0.1, 0.5, 0.9)):
        tag = f"r{_tag(r)}"
        s = _sample(ctx, tag, model, TLCE1, n, int(round(n / r)), _size(10, scale, 1), seed + i, threads)
        _radial_panel(ctx, tag, s, _theory(ctx, tag, model, TLCE1, r))


def tm1_radii(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    n = _size(400, scale, 40)
    r = 10.0
    s = _sample(ctx, "r10", model, TLCE1, n, int(round(n / r)), _size(5, scale, 1), seed, threads)
    result = _theory(ctx, "r10", model, TLCE1, n / int(round(n / r)))
    _radial_panel(ctx, "r10", s, result)
    ctx.values["expected_zero_mode_fraction"] = 1.0 - 1.0 / r


def mp_etce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    n = _size(200, scale)
    s = _sample(ctx, "r0p25", model, ETCE, n, 4 * n, _size(10, scale, 1), seed, threads)
    _real_panel(ctx, "r0p25", s, _theory(ctx, "r0p25", model, ETCE, 0.25))


def tm1_erfc(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    r = 0.5
    for i, base in enumerate((100, 400)):
        n = _size(base, scale)
        tag = f"n{n}"
        s = _sample(ctx, tag, model, TLCE1, n, int(round(n / r)), _size(20, scale, 1), seed + i, threads)
        result = _theory(ctx, tag, model, TLCE1, r)
        r_ext = result.values["r_ext"]
        emp = radial_histogram(s, 200, 1.3 * r_ext)
        _write_curve(ctx, f"empirical_{tag}.csv", emp, {"figure": ctx.name, "n": n})
        ctx.values[f"q_{tag}"] = fit_q(emp, result.curve, r_ext, 1, n)


def abel(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    cmp = abel_falsify(0.5, 1.0, _size(81, scale, 11))
    _write_curve(ctx, "abel_lhs.csv", cmp.lhs, {"figure": ctx.name, "side": "scaled Hermitian-part density"})
    _write_curve(ctx, "abel_rhs.csv", cmp.rhs, {"figure": ctx.name, "side": "forward Abel transform of the radial density"})
    ctx.values["max_discrepancy"] = cmp.max_discrepancy
    ctx.values["control_discrepancy"] = cmp.control_discrepancy


def _sectors(variances: Sequence[float]) -> ModelSpec:
    k = len(variances)
    return ModelSpec(kind="TM2a", variances=list(variances), weights=[1.0 / k] * k)


def tm2a_etce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = _sectors((1.0, 2.0, 4.0, 6.0, 8.0))
    n = _size(100, scale, 10)
    s = _sample(ctx, "r0p02", model, ETCE, n, 50 * n, _size(5, scale, 1), seed, threads)
    _real_panel(ctx, "r0p02", s, _theory(ctx, "r0p02", model, ETCE, 0.02), nbins=120)


def tm2a_tlce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = _sectors((1.0, 5.0))
    n = _size(200, scale)
    s = _sample(ctx, "r0p5", model, TLCE1, n, 2 * n, _size(10, scale, 1), seed, threads)
    _radial_panel(ctx, "r0p5", s, _theory(ctx, "r0p5", model, TLCE1, 0.5))


def tm2a_wrong_law(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = _sectors((1.0, 5.0))
    n = _size(200, scale)
    s = _sample(ctx, "r0p5", model, TLCE1, n, 2 * n, _size(10, scale, 1), seed, threads)
    correct = _theory(ctx, "correct", model, TLCE1, 0.5)
    wrong = _theory(ctx, "wrong_law", model, TLCE1, 0.5, variant="wrong-law")
    _radial_panel(ctx, "correct", s, correct)
    r_ext = correct.values["r_ext"]
    emp = radial_histogram(s, 100, 1.1 * max(r_ext, wrong.values["r_ext"]))
    _compare(ctx, "wrong_law", emp, wrong.curve, (0.05 * r_ext, 0.95 * r_ext))


def tm2b_tlce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM2b", lambda_min=0.35)
    n = _size(200, scale)
    s = _sample(ctx, "r0p5", model, TLCE1, n, 2 * n, _size(10, scale, 1), seed, threads)
    _radial_panel(ctx, "r0p5", s, _theory(ctx, "r0p5", model, TLCE1, 0.5))


def tm3_borders_t1(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM3", tau=5.0)
    n = _size(200, scale)
    for i, r in enumerate((0.5, 0.7)):
        tag = f"r{_tag(r)}"
        _sample(ctx, tag, model, TLCE1, n, int(round(n / r)), _size(5, scale, 1), seed + i, threads)
        _theory(ctx, tag, model, TLCE1, r, variant="t1")


def tm3_etce(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM3", tau=2.5)
    n = _size(100, scale, 10)
    s = _sample(ctx, "r0p1", model, ETCE, n, 10 * n, _size(10, scale, 1), seed, threads)
    _real_panel(ctx, "r0p1", s, _theory(ctx, "r0p1", model, ETCE, 0.1))


def tm3_density_grid(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM3", tau=5.0)
    est = EstimatorSpec(kind="TLCE", lag=10)
    n = _size(100, scale, 20)
    s = _sample(ctx, "t10", model, est, n, 2 * n, _size(10, scale, 1), seed, threads)
    half = 1.05 * float(np.abs(s.eigenvalues).max())
    extent = (-half, half, -half, half)
    theory = density_grid(0.5, model.sigma, model.tau, 10, resolution=_size(61, scale, 21), refine=3, nbins=40, extent=extent)
    _write_curve(ctx, "theory_t10.csv", theory, {"figure": ctx.name, "model": "TM3", "lag": 10, "r": 0.5})
    ctx.values["theory_mass_t10"] = theory.mass
    _compare(ctx, "t10", grid_histogram(s, 40, extent), theory)


def student(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    n = _size(200, scale)
    for i, kind in enumerate(("StudentV1", "StudentV2")):
        dist = ReturnDistribution(kind=kind, mu=3.0)
        tag = kind.lower()
        s = _sample(ctx, tag, model, TLCE1, n, 2 * n, _size(10, scale, 1), seed + i, threads, dist)
        result = _theory(ctx, tag, model, TLCE1, 0.5, dist)
        emp = radial_histogram(s, 100, float(result.curve.edges[-1]))
        _compare(ctx, tag, emp, result.curve)


def free_levy(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    dist = ReturnDistribution(kind="FreeLevyProxy", alpha=1.5)
    n = _size(200, scale)
    s = _sample(ctx, "tlce", model, TLCE1, n, 2 * n, _size(10, scale, 1), seed, threads, dist)
    result = _theory(ctx, "tlce", model, TLCE1, 0.5, dist)
    emp = radial_histogram(s, 100, float(result.curve.edges[-1]))
    _compare(ctx, "tlce", emp, result.curve)
    _theory(ctx, "etce", model, ETCE, 0.5, dist)


def ewma(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    model = ModelSpec(kind="TM1")
    theta = 1.0
    n = _size(200, scale)
    tlce = EstimatorSpec(kind="WeightedTLCE", lag=1, ewma_theta=theta)
    s = _sample(ctx, "tlce", model, tlce, n, 2 * n, _size(10, scale, 1), seed, threads)
    _radial_panel(ctx, "tlce", s, _theory(ctx, "tlce", model, tlce, 0.5))
    etce = EstimatorSpec(kind="WeightedETCE", ewma_theta=theta)
    s = _sample(ctx, "etce", model, etce, n, 2 * n, _size(10, scale, 1), seed + 1, threads)
    _real_panel(ctx, "etce", s, _theory(ctx, "etce", model, etce, 0.5))


def tm4c_eigenvalues(ctx: RunContext, scale: float, seed: int, threads: Optional[int]) -> None:
    rows = []
    for alpha, beta, gamma in ((0.9, 0.1, 0.8), (0.9, 0.8, 0.1)):
        spec = ModelSpec(kind="TM4c", alpha=alpha, beta=beta, gamma=gamma, n_assets=100)
        lam = tm4c_true_eigenvalues(spec, 0, 100)
        rows.append({"alpha": alpha, "beta": beta, "gamma": gamma, "n": 100, "eigenvalues": list(lam)})
        ctx.values[f"eigenvalues_a{_tag(alpha)}_b{_tag(beta)}_g{_tag(gamma)}"] = list(lam)
    ctx.add_artifact(write_json(ctx.path("tm4c_eigenvalues.json"), {"lag": 0, "rows": rows}))


FIGURES: Dict[str, FigureFn] = {
    "tm1-tlce": tm1_tlce,
    "tm1-radii": tm1_radii,
    "mp-etce": mp_etce,
    "tm1-erfc": tm1_erfc,
    "abel-falsify": abel,
    "tm2a-etce": tm2a_etce,
    "tm2a-tlce": tm2a_tlce,
    "tm2a-wrong-law": tm2a_wrong_law,
    "tm2b-tlce": tm2b_tlce,
    "tm3-borders-t1": tm3_borders_t1,
    "tm3-etce": tm3_etce,
    "tm3-density-grid": tm3_density_grid,
    "student": student,
    "free-levy": free_levy,
    "ewma": ewma,
    "tm4c-eigenvalues": tm4c_eigenvalues,
}
