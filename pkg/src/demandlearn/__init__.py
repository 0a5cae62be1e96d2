"""Learning per-consumer price elasticities from aggregate power measurements.

Sparse linear regression (OLS, ridge, lasso, variational garrote) on
randomized per-consumer price perturbations, with a sweep harness for
sample-complexity and SNR phase-transition experiments.
"""

__version__ = "0.1.0"

from .scenario import ScenarioConfig, Dataset, GroundTruth, generate_scenario, snr_to_sigma
from .estimators import (
    FitResult,
    SolverSettings,
    IllConditionedError,
    DivergenceError,
    ols_fit,
    ridge_fit,
    lasso_fit,
    vg_fit,
    vg_free_energy,
    predict,
)
from .selection import Grid, default_grid, select
from .metrics import MetricReport, generalization_error, roc_auc, reconstruction_error
from .harness import SweepSpec, SweepRecord, run_sweep, aggregate, write_csv

__all__ = [
    "ScenarioConfig", "Dataset", "GroundTruth", "generate_scenario",
    "snr_to_sigma", "FitResult", "SolverSettings", "IllConditionedError",
    "DivergenceError", "ols_fit", "ridge_fit", "lasso_fit", "vg_fit",
    "vg_free_energy", "predict", "Grid", "default_grid", "select",
    "MetricReport", "generalization_error", "roc_auc", "reconstruction_error",
    "SweepSpec", "SweepRecord", "run_sweep", "aggregate", "write_csv",
]
