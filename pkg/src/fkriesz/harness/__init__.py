"""Config-driven experiment runner and report emitter."""

from .config import ConfigError, ExperimentConfig, load
from .experiments import REGISTRY, run_experiment
from .report import Report, Verdict, emit


def run(config, out_dir) -> Report:
    """Validate, run and write one experiment; returns the report."""
    cfg = config if isinstance(config, ExperimentConfig) else load(config)
    rep = run_experiment(cfg)
    emit(rep, out_dir)
    return rep


__all__ = ["ConfigError", "ExperimentConfig", "load", "REGISTRY", "run_experiment", "Report", "Verdict",
           "emit", "run"]
