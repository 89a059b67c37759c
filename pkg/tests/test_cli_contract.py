import json
from pathlib import Path

import pytest

from spectra_cli import build_parser, main

TINY = """\
seed: 1
model:
  kind: {kind}
{model_extra}estimator:
  kind: TLCE
  lag: 1
sizes:
  n: 12
  t_len: 24
  iterations: 1
output:
  directory: {out}
"""


def _config(tmp_path, kind="TM1", model_extra=""):
    path = tmp_path / f"{kind.lower()}.yaml"
    path.write_text(TINY.format(kind=kind, model_extra=model_extra, out=(tmp_path / "runs").as_posix()), encoding="utf-8")
    return str(path)


def _records(log_dir):
    lines = []
    for path in sorted(log_dir.glob("run_log_*.jsonl")):
        lines += [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    return lines


def test_no_command_prints_help(capsys):
    assert main([]) == 2
    assert "spectrum" in capsys.readouterr().out


def test_parser_knows_every_command():
    parser = build_parser()
    for argv in (
        ["sample", "--config", "x.yaml"],
        ["spectrum", "--config", "x.yaml", "--seed", "3", "--threads", "2"],
        ["theory", "--config", "x.yaml", "--allow-large-lag"],
        ["compare", "--empirical", "a.csv", "--theory", "b.csv", "--window", "0.1", "0.9"],
        ["figure", "tm1-tlce", "--scale", "0.5"],
        ["selfcheck", "--out", "runs"],
    ):
        assert parser.parse_args(argv).command == argv[0]


def test_spectrum_and_theory_succeed(tmp_path):
    log = tmp_path / "log" / "run_log.jsonl"
    config = _config(tmp_path)
    assert main(["--run-log", str(log), "spectrum", "--config", config, "--threads", "1"]) == 0
    assert main(["--run-log", str(log), "theory", "--config", config]) == 0
    run_dir = tmp_path / "runs" / "tm1"
    assert (run_dir / "density_empirical.csv").exists()
    assert (run_dir / "theory_density.csv").exists()
    records = _records(log.parent)
    assert [r["command"] for r in records] == ["spectrum", "theory"]
    assert all(r["exit_code"] == 0 and r["config"] == "tm1" for r in records)
    assert all("wall_time_ms" in r for r in records)


def test_compare_from_eigenvalues(tmp_path, capsys):
    log = tmp_path / "run_log.jsonl"
    config = _config(tmp_path)
    main(["--run-log", str(log), "spectrum", "--config", config, "--threads", "1"])
    main(["--run-log", str(log), "theory", "--config", config])
    run_dir = tmp_path / "runs" / "tm1"
    code = main([
        "--run-log", str(log), "compare",
        "--eigenvalues", str(run_dir / "eigenvalues.csv"),
        "--theory", str(run_dir / "theory_density.csv"),
    ])
    assert code == 0
    assert "L1=" in capsys.readouterr().out
    assert (run_dir / "compare_report.json").exists()


def test_compare_without_inputs_is_usage_error(tmp_path):
    assert main(["--run-log", str(tmp_path / "log.jsonl"), "compare", "--theory", "b.csv"]) == 2


def test_out_of_scope_theory_exits_3(tmp_path):
    extra = "  variances: [1.0, 2.0]\n  weights: [0.5, 0.5]\n  taus: [1.0, 4.0]\n"
    config = _config(tmp_path, "TM4b", extra)
    log = tmp_path / "run_log.jsonl"
    assert main(["--run-log", str(log), "theory", "--config", config]) == 3
    assert _records(tmp_path)[-1]["exit_code"] == 3


def test_invalid_config_exits_2(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("seed: -1\nmodel:\n  kind: TM1\nsizes:\n  n: 4\n  t_len: 8\n", encoding="utf-8")
    assert main(["--run-log", str(tmp_path / "log.jsonl"), "spectrum", "--config", str(path)]) == 2


def test_large_lag_exits_2_unless_allowed(tmp_path):
    config = _config(tmp_path)
    path = Path(config)
    path.write_text(path.read_text(encoding="utf-8").replace("lag: 1", "lag: 5"), encoding="utf-8")
    log = str(tmp_path / "log.jsonl")
    assert main(["--run-log", log, "spectrum", "--config", config]) == 2
    assert main(["--run-log", log, "spectrum", "--config", config, "--allow-large-lag", "--threads", "1"]) == 0


def test_missing_config_file_exits_1(tmp_path):
    assert main(["--run-log", str(tmp_path / "log.jsonl"), "theory", "--config", str(tmp_path / "absent.yaml")]) == 1


def test_unknown_figure_exits_2(tmp_path, capsys):
    code = main(["--run-log", str(tmp_path / "log.jsonl"), "figure", "fig-99", "--out", str(tmp_path)])
    assert code == 2
    assert "tm1-tlce" in capsys.readouterr().err


def test_figure_without_id_exits_2(tmp_path):
    assert main(["--run-log", str(tmp_path / "log.jsonl"), "figure"]) == 2


@pytest.mark.slow
def test_selfcheck_passes(tmp_path):
    assert main(["--run-log", str(tmp_path / "log.jsonl"), "selfcheck", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "selfcheck" / "selfcheck.json").read_text(encoding="utf-8"))
    assert report["passed"]
    assert set(report["checks"]) >= {"mp_mass", "tm1_radii", "r_c", "zero_modes"}
