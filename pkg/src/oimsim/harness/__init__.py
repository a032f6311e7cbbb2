"""Experiment harness: specs, Monte Carlo drivers, persistence and CLI."""

from .config import KINDS, ExperimentRecord, ExperimentSpec
from .experiments import (
    COLUMNS,
    run_cdf_check,
    run_dof_sweep,
    run_experiment,
    run_leakage_sweep,
    run_multicarrier_compare,
    run_trials,
    run_two_step,
)
from .output import emit, render

__all__ = [
    "COLUMNS", "KINDS", "ExperimentRecord", "ExperimentSpec", "emit", "render",
    "run_cdf_check", "run_dof_sweep", "run_experiment", "run_leakage_sweep",
    "run_multicarrier_compare", "run_trials", "run_two_step",
]
