"""CLI commands: sample, spectrum, theory, compare, figure, selfcheck.

Each command builds a RunContext under <output.directory>/<name>, writes its
artifacts through src.runner.io and finishes with a manifest.
"""
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from src.errors import EmptyWindowError, ParameterError, SpectraError, UnknownFigureError
from src.runner.config import ExperimentConfig
from src.runner.instrumentation import time_stage
from src.runner.io import (
    borderline_frame,
    curve_frame,
    curve_from_csv,
    curve_header,
    eigenvalue_frame,
    read_csv,
    write_csv,
    write_json,
)
from src.runner.manifest import RunContext, RunManifest, finish
from src.runner.settings import load_solver_settings
from src.sampling.dispatch import sample_returns
from src.sampling.rng import RngStream
from src.spectra.density import DensityCurve, grid_histogram, l1_distance, radial_histogram, real_histogram
from src.spectra.eigen import SpectrumSample
from src.spectra.montecarlo import run_monte_carlo, spectrum_summary
from src.theory.reference import fit_q
from src.theory.registry import TheoryRegistry, TheoryRequest
from src.theory.types import TheoryCurve

logger = logging.getLogger(__name__)

ROTATIONAL_MODELS = ("TM1", "TM2a", "TM2b")
BULK_WINDOW = (0.05, 0.95)


def _context(config: ExperimentConfig, command: str) -> RunContext:
    return RunContext(config.name, config.run_dir, command, config.echo())


def run_header(config: ExperimentConfig, **extra: Any) -> Dict[str, Any]:
    """Header block sufficient to re-create the run's config."""
    return {
        "name": config.name,
        "model": config.model.kind,
        "model_params": config.model.summary(),
        "distribution": config.distribution.model_dump(exclude_none=True),
        "estimator": config.estimator.kind,
        "lag": config.estimator.lag,
        "n": config.sizes.n,
        "t_len": config.sizes.t_len,
        "r": config.r,
        "iterations": config.sizes.iterations,
        "seed": config.seed,
        **extra,
    }


@time_stage("monte_carlo")
def _simulate(ctx: RunContext, config: ExperimentConfig) -> SpectrumSample:
    s = config.sizes
    return run_monte_carlo(
        config.model,
        config.distribution,
        config.estimator,
        s.n,
        s.t_len,
        s.iterations,
        config.seed,
        config.threads,
        s.max_entries,
    )


def empirical_density(s: SpectrumSample, config: ExperimentConfig) -> DensityCurve:
    """Histogram of a pooled spectrum in the coordinates its model calls for."""
    h = config.histogram
    kind = h.kind
    if kind == "auto":
        if s.hermitian:
            kind = "real_line"
        elif config.model.kind in ROTATIONAL_MODELS:
            kind = "radial"
        else:
            kind = "grid2d"
    ev = s.eigenvalues
    reach = float(np.abs(ev).max()) if ev.size else 1.0
    if kind == "radial":
        return radial_histogram(s, h.nbins, h.r_max or h.r_max_factor * reach)
    if kind == "real_line":
        lo = h.x_min if h.x_min is not None else min(0.0, float(ev.real.min()))
        hi = h.x_max if h.x_max is not None else h.r_max_factor * float(ev.real.max())
        return real_histogram(s, h.nbins, lo, hi)
    half = h.r_max_factor * reach
    return grid_histogram(s, h.nbins, (-half, half, -half, half))


def cmd_sample(config: ExperimentConfig) -> RunManifest:
    """Sample the Monte Carlo ensemble; writes the pooled eigenvalues and, optionally, one return matrix."""
    ctx = _context(config, "sample")
    if config.output.save_returns:
        r = sample_returns(config.model, config.distribution, config.sizes.n, config.sizes.t_len, RngStream(config.seed, 0), config.sizes.max_entries)
        path = ctx.path("returns_000.npy")
        np.save(path, np.asarray(r.data))
        ctx.add_artifact(path)
    s = _simulate(ctx, config)
    ctx.add_artifact(write_csv(ctx.path("eigenvalues.csv"), eigenvalue_frame(s), run_header(config)))
    return finish(ctx)


def cmd_spectrum(config: ExperimentConfig) -> RunManifest:
    """Eigenvalues, summary statistics and the empirical density of the configured ensemble."""
    ctx = _context(config, "spectrum")
    s = _simulate(ctx, config)
    header = run_header(config)
    ctx.add_artifact(write_csv(ctx.path("eigenvalues.csv"), eigenvalue_frame(s), header))
    summary = spectrum_summary(s)
    ctx.values.update(summary)
    ctx.add_artifact(write_json(ctx.path("summary.json"), {**header, **summary}))
    curve = empirical_density(s, config)
    ctx.add_artifact(write_csv(ctx.path("density_empirical.csv"), curve_frame(curve), {**header, **curve_header(curve)}))
    return finish(ctx)


def theory_request(config: ExperimentConfig, settings: Dict[str, Any]) -> TheoryRequest:
    t = config.theory
    return TheoryRequest(
        config.model,
        config.estimator,
        config.distribution,
        config.r,
        points=t.grid_points or settings["grid_points"],
        nbins=t.nbins or settings["radial_bins"],
        variant=t.solvers[0] if t.solvers else None,
        resolution=t.resolution or settings["grid_resolution"],
        refine=t.refine or settings["grid_refine"],
        epsilon=t.epsilon or settings["etce_epsilon"],
    )


@time_stage("theory")
def _solve(ctx: RunContext, request: TheoryRequest) -> TheoryCurve:
    return TheoryRegistry.create(request)


def write_theory(ctx: RunContext, result: TheoryCurve, header: Dict[str, Any], prefix: str = "theory") -> None:
    scalars = {k: v for k, v in result.values.items() if np.isscalar(v) or isinstance(v, (list, tuple))}
    header = {**header, "theory": result.name, **scalars}
    if result.curve is not None:
        path = ctx.path(f"{prefix}_density.csv")
        ctx.add_artifact(write_csv(path, curve_frame(result.curve), {**header, **curve_header(result.curve)}))
    if result.borderline is not None:
        b = result.borderline
        extra = {k: v for k, v in b.metadata.items() if np.isscalar(v) or isinstance(v, (list, tuple))}
        ctx.add_artifact(write_csv(ctx.path(f"{prefix}_borderline.csv"), borderline_frame(b), {**header, "borderline": b.kind, **extra}))
    ctx.add_artifact(write_json(ctx.path(f"{prefix}_values.json"), {**header, "values": result.values}))


def cmd_theory(config: ExperimentConfig) -> RunManifest:
    """Theoretical density and/or borderline for the configured triple."""
    if not config.theory.enabled:
        raise ParameterError("theory is disabled in this config (theory.enabled: false)")
    ctx = _context(config, "theory")
    settings = load_solver_settings(config.model.kind)
    request = theory_request(config, settings)
    result = _solve(ctx, request)
    ctx.values.update(result.values)
    write_theory(ctx, result, run_header(config, solver_settings=settings))
    return finish(ctx)


def _bulk_window(header: Dict[str, Any], theory: DensityCurve) -> Optional[Tuple[float, float]]:
    if theory.kind == "radial" and header.get("r_ext") and math.isfinite(float(header["r_ext"])):
        r_ext = float(header["r_ext"])
        return BULK_WINDOW[0] * r_ext, BULK_WINDOW[1] * r_ext
    if theory.kind == "grid2d":
        return None
    support = theory.centers[theory.density > 0]
    if support.size < 2:
        return None
    lo, hi = float(support.min()), float(support.max())
    pad = 0.05 * (hi - lo)
    return lo + pad, hi - pad


def compare_curves(
    empirical: DensityCurve,
    theory: DensityCurve,
    theory_header: Dict[str, Any],
    n: Optional[int] = None,
    window: Optional[Tuple[float, float]] = None,
    threshold: float = 0.02,
) -> Dict[str, Any]:
    """L1 over the bulk, empirical mass outside the theoretical support and the fitted erfc q."""
    if empirical.kind != theory.kind:
        raise ParameterError(f"cannot compare a {empirical.kind} histogram with a {theory.kind} theory curve")
    window = window or _bulk_window(theory_header, theory)
    l1 = l1_distance(empirical, theory, window)
    outside = None
    if empirical.kind != "grid2d":
        zero = theory.at(empirical.centers) <= 0
        outside = float(np.sum((empirical.density * empirical.widths())[zero]))
    q = None
    r_ext = theory_header.get("r_ext")
    if empirical.kind == "radial" and n and r_ext and math.isfinite(float(r_ext)):
        try:
            q = fit_q(empirical, theory, float(r_ext), 1, int(n))
        except EmptyWindowError as exc:
            logger.warning("compare fit_q skipped: %s", exc)
    return {
        "kind": empirical.kind,
        "window": list(window) if window else None,
        "l1": l1,
        "outside_fraction": outside,
        "fitted_q": q,
        "threshold": threshold,
        "passed": bool(l1 < threshold),
    }


def histogram_eigenvalues(eigenvalues_path: Path, theory_path: Path) -> Path:
    """Histogram an eigenvalue CSV on the theory curve's bins; writes density_empirical.csv beside it."""
    eh, frame = read_csv(Path(eigenvalues_path))
    _, theo = curve_from_csv(Path(theory_path))
    ev = frame["re"].to_numpy() + 1j * frame["im"].to_numpy()
    iterations = int(eh.get("iterations", 1))
    n = int(eh.get("n", ev.size // iterations))
    s = SpectrumSample(ev, n, int(eh.get("t_len", n)), int(eh.get("lag", 0)), iterations, hermitian=theo.kind == "real_line")
    nbins = theo.centers.size
    if theo.kind == "grid2d":
        hx = 0.5 * (theo.centers[1] - theo.centers[0])
        hy = 0.5 * (theo.y_centers[1] - theo.y_centers[0])
        extent = (theo.centers[0] - hx, theo.centers[-1] + hx, theo.y_centers[0] - hy, theo.y_centers[-1] + hy)
        curve = grid_histogram(s, nbins, extent)
    else:
        edges = theo.edges if theo.edges is not None else np.concatenate([theo.centers, [2 * theo.centers[-1] - theo.centers[-2]]])
        if theo.kind == "radial":
            curve = radial_histogram(s, nbins, float(edges[-1]))
        else:
            curve = real_histogram(s, nbins, float(edges[0]), float(edges[-1]))
    out = Path(eigenvalues_path).with_name("density_empirical.csv")
    keep = {k: v for k, v in eh.items() if k not in ("kind", "mass", "edges")}
    return write_csv(out, curve_frame(curve), {**keep, **curve_header(curve)})


def cmd_compare(
    empirical_path: Path,
    theory_path: Path,
    out_path: Optional[Path] = None,
    window: Optional[Tuple[float, float]] = None,
    threshold: Optional[float] = None,
) -> Dict[str, Any]:
    """Compare an empirical density CSV with a theory CSV; writes a JSON report."""
    eh, emp = curve_from_csv(Path(empirical_path))
    th, theo = curve_from_csv(Path(theory_path))
    if eh.get("model") != th.get("model"):
        logger.warning("compare model mismatch: empirical=%s theory=%s", eh.get("model"), th.get("model"))
    if threshold is None:
        threshold = load_solver_settings(str(th.get("model", "default")))["compare_threshold"]
    report = compare_curves(emp, theo, th, eh.get("n"), window, threshold)
    report.update({"empirical": str(empirical_path), "theory": str(theory_path), "model": th.get("model")})
    out = Path(out_path) if out_path else Path(empirical_path).with_name("compare_report.json")
    write_json(out, report)
    logger.info("compare l1=%.5f passed=%s report=%s", report["l1"], report["passed"], out)
    return report


def cmd_figure(fig_id: str, out_dir: str = "runs", scale: float = 1.0, seed: int = 42, threads: Optional[int] = None) -> RunManifest:
    """Run one figure pipeline at desk scale."""
    from src.runner.figures import FIGURES

    if fig_id not in FIGURES:
        raise UnknownFigureError(f"unknown figure id {fig_id!r}; valid ids: {', '.join(sorted(FIGURES))}")
    if scale <= 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    ctx = RunContext(fig_id, Path(out_dir) / fig_id, "figure", {"id": fig_id, "scale": scale, "seed": seed})
    time_stage(fig_id)(FIGURES[fig_id])(ctx, scale, seed, threads)
    ctx.add_artifact(write_json(ctx.path("figure_summary.json"), {"id": fig_id, "scale": scale, "seed": seed, "values": ctx.values}))
    return finish(ctx)


def _selfchecks() -> List[Tuple[str, Callable[[], bool]]]:
    from src.covariance.kernels import exponential_kernel_params
    from src.covariance.models import EstimatorSpec, ModelSpec, ReturnDistribution
    from src.numerics.contour import classify_roots, trapezoid_contour_integral, unit_circle_residue_integral
    from src.numerics.polynomial import Polynomial, poly_roots
    from src.spectra.eigen import zero_mode_fraction
    from src.theory.abel import _control
    from src.theory.hermitian import mp_density, mp_edges
    from src.theory.tm1 import tm1_tlce_density_curve, tm1_tlce_radii
    from src.theory.tm3 import critical_ratio, tm3_etce_edges, tm3_w_coeffs

    def mp_mass() -> bool:
        lo, hi = mp_edges(0.25)
        xs = np.linspace(lo, hi, 4001)
        return abs(float(trapezoid(mp_density(xs, 0.25), xs)) - 1.0) < 1e-2

    def tm1_radii() -> bool:
        r_ext, r_int = tm1_tlce_radii(0.5)
        return abs(r_ext - math.sqrt(0.75)) < 1e-12 and r_int == 0.0

    def tm1_mass() -> bool:
        return abs(tm1_tlce_density_curve(0.5, 1.0, 100).mass - 1.0) < 2e-2

    def vieta() -> bool:
        p = Polynomial.from_coeffs([2.0, -3.0, 0.5, 1.0])
        return poly_roots(p).vieta_residual(p) < 1e-10

    def w_roots_split() -> bool:
        a1, a2, _ = exponential_kernel_params(1.0, 5.0)
        gen = np.random.default_rng(7)
        for _ in range(20):
            G = complex(gen.normal(), gen.normal())
            h = float(gen.uniform(0.01, 2.0))
            coeffs = tm3_w_coeffs(G, h, 0.5, a1, a2, 3)
            roots = poly_roots(Polynomial.from_coeffs(coeffs)).as_array()
            if int(classify_roots(roots).sum()) != 4:
                return False
        return True

    def residue_vs_trapezoid() -> bool:
        num = Polynomial.from_coeffs([0.0, 1.0])
        den = Polynomial.from_coeffs([0.1, -0.2, 3.0, 0.4])
        return abs(unit_circle_residue_integral(num, den) - trapezoid_contour_integral(num, den)) < 1e-8

    def abel_control() -> bool:
        return _control(21) < 1e-4

    def r_c() -> bool:
        return abs(critical_ratio(5.0) - 0.59869) < 1e-5

    def tm3_edges() -> bool:
        lo, hi = tm3_etce_edges(0.1, 1.0, 2.5)
        return 0.0 <= lo < hi

    def zero_modes() -> bool:
        s = run_monte_carlo(ModelSpec(kind="TM1"), ReturnDistribution(), EstimatorSpec(kind="TLCE", lag=1), 20, 10, 2, 11, 1)
        return abs(zero_mode_fraction(s) - 0.5) < 1e-12

    return [
        ("mp_mass", mp_mass),
        ("tm1_radii", tm1_radii),
        ("tm1_mass", tm1_mass),
        ("vieta", vieta),
        ("w_roots_split", w_roots_split),
        ("residue_vs_trapezoid", residue_vs_trapezoid),
        ("abel_control", abel_control),
        ("r_c", r_c),
        ("tm3_edges", tm3_edges),
        ("zero_modes", zero_modes),
    ]


def selfcheck(out_dir: str = "runs") -> Tuple[RunManifest, bool]:
    """Fast invariant suite; writes selfcheck.json and returns whether everything passed."""
    ctx = RunContext("selfcheck", Path(out_dir) / "selfcheck", "selfcheck", {})
    results: Dict[str, Any] = {}
    for name, check in _selfchecks():
        try:
            results[name] = {"passed": bool(check())}
        except (SpectraError, ArithmeticError, ValueError) as exc:
            results[name] = {"passed": False, "error": str(exc)}
        logger.info("selfcheck check=%s passed=%s", name, results[name]["passed"])
    passed = all(v["passed"] for v in results.values())
    ctx.values.update({"passed": passed})
    ctx.add_artifact(write_json(ctx.path("selfcheck.json"), {"passed": passed, "checks": results}))
    return finish(ctx), passed
