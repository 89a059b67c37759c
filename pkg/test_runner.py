import json
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.errors import ParameterError, UnknownFigureError
from src.runner import cmd_compare, cmd_figure, cmd_sample, cmd_spectrum, cmd_theory, load_config
from src.runner.commands import compare_curves, histogram_eigenvalues
from src.runner.instrumentation import time_stage
from src.runner.io import curve_from_csv, read_csv, write_csv
from src.runner.manifest import RunContext
from src.runner.runlog import append_run_record
from src.runner.settings import load_solver_settings
from src.spectra import curve_from_samples

TINY = """\
seed: 3
model:
  kind: TM1
estimator:
  kind: TLCE
  lag: 1
sizes:
  n: 20
  t_len: 40
  iterations: 2
histogram:
  kind: radial
  nbins: 20
theory:
  nbins: 40
output:
  directory: {out}
"""


def _tiny(tmp_path, name="tiny.yaml", **extra):
    path = tmp_path / name
    text = TINY.format(out=(tmp_path / "runs").as_posix())
    for key, value in extra.items():
        text += f"{key}: {value}\n"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_yaml_config(tmp_path):
    config = load_config(_tiny(tmp_path))
    assert config.name == "tiny"
    assert config.r == pytest.approx(0.5)
    assert config.run_dir == tmp_path / "runs" / "tiny"
    assert config.echo()["r"] == pytest.approx(0.5)


def test_json_config_matches_yaml(tmp_path):
    yaml_config = load_config(_tiny(tmp_path))
    data = yaml_config.model_dump(mode="json")
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    assert load_config(path).model_dump() == yaml_config.model_dump()


def test_config_requires_seed(tmp_path):
    path = tmp_path / "noseed.yaml"
    path.write_text("model:\n  kind: TM1\nsizes:\n  n: 4\n  t_len: 8\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(path)


def test_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ValueError):
        load_config(_tiny(tmp_path, colour="blue"))


def test_config_rejects_unknown_suffix(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text("seed = 1\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        load_config(path)


def test_large_lag_needs_opt_in(tmp_path):
    path = tmp_path / "lag.yaml"
    text = TINY.format(out=tmp_path.as_posix()).replace("lag: 1", "lag: 10")
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValueError):
        load_config(path)
    path.write_text(text + "allow_large_lag: true\n", encoding="utf-8")
    assert load_config(path).estimator.lag == 10


def test_overrides_revalidate(tmp_path):
    config = load_config(_tiny(tmp_path))
    other = config.with_overrides(seed=9, threads=2, out=str(tmp_path / "elsewhere"))
    assert (other.seed, other.threads) == (9, 2)
    assert other.run_dir == tmp_path / "elsewhere" / "tiny"
    assert config.seed == 3
    with pytest.raises(ValueError):
        config.with_overrides(threads=0)


def test_solver_settings_merge(tmp_path):
    path = tmp_path / "solver.json"
    path.write_text(json.dumps({"default": {"grid_points": 50}, "TM3": {"etce_epsilon": 1e-8}}), encoding="utf-8")
    tm3 = load_solver_settings("TM3", str(path))
    assert tm3["etce_epsilon"] == 1e-8
    assert tm3["grid_points"] == 50
    assert tm3["compare_threshold"] == 0.02
    assert load_solver_settings("TM1", str(path))["etce_epsilon"] == 1e-6


def test_solver_settings_fallback(tmp_path):
    missing = load_solver_settings("TM1", str(tmp_path / "absent.json"))
    assert missing["radial_bins"] == 200
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert load_solver_settings("TM1", str(broken))["grid_resolution"] == 121


def test_csv_header_round_trip(tmp_path):
    header = {"model": "TM1", "n": 20, "model_params": {"sigma": 1.0}, "window": [0.1, 0.9]}
    path = write_csv(tmp_path / "x.csv", pd.DataFrame({"a": [1.5, 2.5]}), header)
    assert path.read_text(encoding="utf-8").startswith("# model: ")
    got, frame = read_csv(path)
    assert got == header
    assert frame["a"].tolist() == [1.5, 2.5]


def test_time_stage_records_duration(tmp_path):
    ctx = RunContext("t", tmp_path, "test")

    @time_stage("work")
    def work(c, x):
        return x + 1

    assert work(ctx, 1) == 2
    assert "work" in ctx.timings


def test_run_log_rotates_daily(tmp_path, monkeypatch):
    class FixedDatetime:
        @classmethod
        def now(cls, tz=None):
            return datetime(2026, 1, 2, 3, 4, 5, tzinfo=tz)

    monkeypatch.setattr("src.runner.runlog.datetime", FixedDatetime)
    base = tmp_path / "run_log.jsonl"
    path = append_run_record({"command": "spectrum", "exit_code": 0}, str(base))
    assert path == tmp_path / "run_log_2026-01-02.jsonl"
    append_run_record({"command": "theory", "exit_code": 3}, str(base))
    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert [rec["exit_code"] for rec in lines] == [0, 3]
    assert lines[0]["timestamp"] == "2026-01-02T03:04:05+00:00"
    flat = append_run_record({"command": "x"}, str(base), daily_rotation=False)
    assert flat == base


def test_spectrum_writes_artifacts_and_stable_digest(tmp_path):
    config = load_config(_tiny(tmp_path))
    first = cmd_spectrum(config)
    names = {a["file"] for a in first.artifacts}
    assert names == {"eigenvalues.csv", "summary.json", "density_empirical.csv"}
    assert (config.run_dir / "manifest.json").exists()
    second = cmd_spectrum(config)
    assert second.digest == first.digest
    reseeded = cmd_spectrum(config.with_overrides(seed=4))
    assert reseeded.digest != first.digest
    header, frame = read_csv(config.run_dir / "eigenvalues.csv")
    assert header["seed"] == 4
    assert len(frame) == 40


def test_theory_command_and_self_comparison(tmp_path):
    config = load_config(_tiny(tmp_path))
    manifest = cmd_theory(config)
    names = {a["file"] for a in manifest.artifacts}
    assert names == {"theory_density.csv", "theory_borderline.csv", "theory_values.json"}
    values = json.loads((config.run_dir / "theory_values.json").read_text(encoding="utf-8"))
    assert values["values"]["r_ext"] == pytest.approx(np.sqrt(0.75))
    theory = config.run_dir / "theory_density.csv"
    report = cmd_compare(theory, theory, tmp_path / "report.json")
    assert report["l1"] == pytest.approx(0.0, abs=1e-12)
    assert report["passed"]
    assert (tmp_path / "report.json").exists()


def test_compare_eigenvalues_on_theory_bins(tmp_path):
    config = load_config(_tiny(tmp_path))
    cmd_spectrum(config)
    cmd_theory(config)
    empirical = histogram_eigenvalues(config.run_dir / "eigenvalues.csv", config.run_dir / "theory_density.csv")
    _, curve = curve_from_csv(empirical)
    assert curve.kind == "radial"
    assert curve.centers.size == 40
    report = cmd_compare(empirical, config.run_dir / "theory_density.csv")
    assert (config.run_dir / "compare_report.json").exists()
    assert set(report) >= {"l1", "outside_fraction", "fitted_q", "threshold", "passed"}
    assert report["threshold"] == 0.02


def test_theory_disabled(tmp_path):
    path = tmp_path / "off.yaml"
    path.write_text(TINY.format(out=tmp_path.as_posix()).replace("theory:\n  nbins: 40", "theory:\n  enabled: false"), encoding="utf-8")
    with pytest.raises(ParameterError):
        cmd_theory(load_config(path))


def test_compare_kind_mismatch():
    xs = np.linspace(0, 1, 10)
    radial = curve_from_samples("radial", xs, xs)
    line = curve_from_samples("real_line", xs, xs)
    with pytest.raises(ParameterError):
        compare_curves(radial, line, {})


def test_figure_arguments_checked(tmp_path):
    with pytest.raises(UnknownFigureError) as exc:
        cmd_figure("fig-99", str(tmp_path))
    assert "tm1-tlce" in str(exc.value)
    assert exc.value.exit_code == 2
    with pytest.raises(ParameterError):
        cmd_figure("tm1-radii", str(tmp_path), scale=0.0)


def test_figure_tm1_radii(tmp_path):
    manifest = cmd_figure("tm1-radii", str(tmp_path), scale=0.1, seed=5, threads=1)
    summary = json.loads(Path(tmp_path / "tm1-radii" / "figure_summary.json").read_text(encoding="utf-8"))
    assert summary["id"] == "tm1-radii"
    assert any(a["file"] == "figure_summary.json" for a in manifest.artifacts)


def test_sample_writes_eigenvalues_and_returns(tmp_path):
    path = tmp_path / "sample.yaml"
    path.write_text(TINY.format(out=(tmp_path / "runs").as_posix()).replace("directory:", "save_returns: true\n  directory:"), encoding="utf-8")
    config = load_config(path)
    manifest = cmd_sample(config)
    assert {a["file"] for a in manifest.artifacts} == {"returns_000.npy", "eigenvalues.csv"}
    returns = np.load(config.run_dir / "returns_000.npy")
    assert returns.shape == (20, 40)
