"""Experiment runner: config loading, run artifacts and the CLI commands."""
from src.runner.commands import cmd_compare, cmd_figure, cmd_sample, cmd_spectrum, cmd_theory, selfcheck
from src.runner.config import ExperimentConfig, load_config
from src.runner.manifest import RunContext, RunManifest

__all__ = [
    "ExperimentConfig",
    "RunContext",
    "RunManifest",
    "cmd_compare",
    "cmd_figure",
    "cmd_sample",
    "cmd_spectrum",
    "cmd_theory",
    "load_config",
    "selfcheck",
]
