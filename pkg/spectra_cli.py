#!/usr/bin/env python3
"""
Spectra CLI

Purpose:
    Monte Carlo spectra of time-lagged covariance estimators and their theoretical
    densities and borderlines.

Usage:
    # Pooled eigenvalues of an experiment
    python spectra_cli.py sample --config config/experiments/tm1_tlce.yaml

    # Eigenvalues, summary statistics and the empirical density
    python spectra_cli.py spectrum --config config/experiments/tm1_tlce.yaml --seed 7 --threads 4

    # Theoretical density / borderline for the same experiment
    python spectra_cli.py theory --config config/experiments/tm1_tlce.yaml

    # Compare an empirical density (or raw eigenvalues) against theory
    python spectra_cli.py compare --empirical runs/tm1_tlce/density_empirical.csv --theory runs/tm1_tlce/theory_density.csv
    python spectra_cli.py compare --eigenvalues runs/tm1_tlce/eigenvalues.csv --theory runs/tm1_tlce/theory_density.csv

    # One figure pipeline at desk scale
    python spectra_cli.py figure tm1-tlce --scale 0.5

    # Fast invariant suite
    python spectra_cli.py selfcheck

Exit codes: 0 success, 1 I/O or internal error, 2 invalid parameters,
3 theory out of scope, 4 numerical failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.errors import SpectraError
from src.runner import cmd_compare, cmd_figure, cmd_sample, cmd_spectrum, cmd_theory, load_config, selfcheck
from src.runner.commands import histogram_eigenvalues
from src.runner.figures import FIGURES
from src.runner.runlog import append_run_record

logger = logging.getLogger("spectra_cli")


def _config(args):
    config = load_config(args.config, args.allow_large_lag)
    return config.with_overrides(args.seed, args.threads, args.out, args.allow_large_lag)


def run_sample(args) -> int:
    config = _config(args)
    manifest = cmd_sample(config)
    args.record.update({"config": config.name, "seed": config.seed, "artifacts": len(manifest.artifacts)})
    print(f"Wrote {len(manifest.artifacts)} artifacts to {config.run_dir}")
    return 0


def run_spectrum(args) -> int:
    config = _config(args)
    manifest = cmd_spectrum(config)
    args.record.update({"config": config.name, "seed": config.seed, "artifacts": len(manifest.artifacts)})
    print(f"Wrote {len(manifest.artifacts)} artifacts to {config.run_dir}")
    return 0


def run_theory(args) -> int:
    config = _config(args)
    manifest = cmd_theory(config)
    args.record.update({"config": config.name, "seed": config.seed, "artifacts": len(manifest.artifacts)})
    print(f"Wrote {len(manifest.artifacts)} artifacts to {config.run_dir}")
    return 0


def run_compare(args) -> int:
    if not args.theory or not (args.empirical or args.eigenvalues):
        print("Error: compare needs --theory and one of --empirical / --eigenvalues", file=sys.stderr)
        return 2
    empirical = args.empirical or histogram_eigenvalues(args.eigenvalues, args.theory)
    window = tuple(args.window) if args.window else None
    report = cmd_compare(empirical, args.theory, args.report, window, args.threshold)
    args.record.update({"config": report.get("model"), "artifacts": 1})
    print(f"L1={report['l1']:.5f} threshold={report['threshold']} passed={report['passed']}")
    return 0


def run_figure(args) -> int:
    fig_id = args.id or args.fig_id
    if not fig_id:
        print(f"Error: figure needs an id; valid ids: {', '.join(sorted(FIGURES))}", file=sys.stderr)
        return 2
    manifest = cmd_figure(fig_id, args.out or "runs", args.scale, args.seed if args.seed is not None else 42, args.threads)
    args.record.update({"config": fig_id, "seed": args.seed, "artifacts": len(manifest.artifacts)})
    print(f"Figure {fig_id}: {len(manifest.artifacts)} artifacts")
    return 0


def run_selfcheck(args) -> int:
    manifest, passed = selfcheck(args.out or "runs")
    args.record.update({"config": "selfcheck", "artifacts": len(manifest.artifacts)})
    print("selfcheck passed" if passed else "selfcheck FAILED")
    return 0 if passed else 4


def _common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", required=True, help="Experiment file (.yaml/.yml/.json)")
    p.add_argument("--seed", type=int, help="Override the base seed")
    p.add_argument("--threads", type=int, help="Worker threads (default: logical cores)")
    p.add_argument("--out", help="Output directory (default: the config's output.directory)")
    p.add_argument("--allow-large-lag", action="store_true", help="Run with lag t > T/10")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Spectra of time-lagged covariance estimators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--run-log", help="JSONL run log (default: runs/run_log.jsonl, rotated daily)")
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    sample_parser = subparsers.add_parser("sample", help="Sample the Monte Carlo ensemble")
    _common(sample_parser)
    sample_parser.set_defaults(func=run_sample)

    spectrum_parser = subparsers.add_parser("spectrum", help="Eigenvalues, summary and empirical density")
    _common(spectrum_parser)
    spectrum_parser.set_defaults(func=run_spectrum)

    theory_parser = subparsers.add_parser("theory", help="Theoretical density / borderline")
    _common(theory_parser)
    theory_parser.set_defaults(func=run_theory)

    compare_parser = subparsers.add_parser("compare", help="Compare empirical and theoretical densities")
    compare_parser.add_argument("--empirical", type=Path, help="Empirical density CSV")
    compare_parser.add_argument("--eigenvalues", type=Path, help="Eigenvalue CSV, histogrammed on the theory bins")
    compare_parser.add_argument("--theory", type=Path, help="Theory density CSV")
    compare_parser.add_argument("--report", type=Path, help="Report path (default: compare_report.json beside the empirical CSV)")
    compare_parser.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), help="L1 window")
    compare_parser.add_argument("--threshold", type=float, help="Pass threshold for the L1 distance")
    compare_parser.set_defaults(func=run_compare)

    figure_parser = subparsers.add_parser("figure", help="Run one figure pipeline")
    figure_parser.add_argument("fig_id", nargs="?", help="Figure id")
    figure_parser.add_argument("--id", help="Figure id")
    figure_parser.add_argument("--scale", type=float, default=1.0, help="Size multiplier")
    _common(figure_parser, config=False)
    figure_parser.set_defaults(func=run_figure)

    selfcheck_parser = subparsers.add_parser("selfcheck", help="Fast invariant suite")
    selfcheck_parser.add_argument("--out", help="Output directory")
    selfcheck_parser.set_defaults(func=run_selfcheck)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    if not args.command:
        parser.print_help()
        return 2

    args.record = {"command": args.command}
    start = time.perf_counter()
    try:
        code = args.func(args)
    except SpectraError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        code = exc.exit_code
    except ValidationError as exc:
        print(f"Error: invalid configuration\n{exc}", file=sys.stderr)
        code = 2
    except OSError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        code = 1
    args.record.update({"exit_code": code, "wall_time_ms": int((time.perf_counter() - start) * 1000)})
    append_run_record(args.record, args.run_log)
    return code


if __name__ == "__main__":
    sys.exit(main())
