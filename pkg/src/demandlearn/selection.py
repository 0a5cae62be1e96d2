"""Hyperparameter selection on a held-out validation set.

Fits each candidate hyperparameter on the training set and keeps the one with
the smallest sum of squared prediction errors on the validation set. Ties go
to the sparser solution, then to the stronger regularization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import estimators
from .estimators import FitResult, SolverSettings, DEFAULT_SETTINGS
from .scenario import Dataset

__all__ = ["Grid", "default_grid", "select", "METHODS"]

logger = logging.getLogger(__name__)

METHODS = ("ols", "ridge", "lasso", "vg")


@dataclass(frozen=True)
class Grid:
    """Ordered hyperparameter candidates."""

    values: tuple[float, ...]
    scale: str  # "log" or "linear"

    def __post_init__(self):
        if not self.values:
            raise ValueError("grid must be non-empty")
        diffs = np.diff(self.values)
        if len(self.values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid values must be strictly monotone")
        if self.scale not in ("log", "linear"):
            raise ValueError(f"unknown scale {self.scale!r}")


def lambda_max(data: Dataset) -> float:
    """Smallest penalty for which the lasso solution is identically zero."""
    return float(np.max(np.abs(data.prices.T @ data.response)))


def default_grid(method: str, data: Dataset) -> Grid:
    """Committed search grids: 50 log-spaced penalties for ridge/lasso in
    [1e-4 * lambda_max, lambda_max]; 25 linear sparsity levels in [-20, 0]
    for the variational garrote."""
    if method in ("ridge", "lasso"):
        lmax = lambda_max(data)
        if lmax <= 0:
            raise ValueError("degenerate data: all input-output covariances zero")
        values = np.geomspace(1e-4 * lmax, lmax, 50)
        return Grid(values=tuple(float(v) for v in values), scale="log")
    if method == "vg":
        values = np.linspace(-20.0, 0.0, 25)
        return Grid(values=tuple(float(v) for v in values), scale="linear")
    raise ValueError(f"no grid for method {method!r}")


def _fit(method: str, data: Dataset, hyper: float,
         settings: SolverSettings) -> FitResult:
    if method == "ridge":
        return estimators.ridge_fit(data, hyper)
    if method == "lasso":
        return estimators.lasso_fit(data, hyper, settings)
    if method == "vg":
        return estimators.vg_fit(data, hyper, settings)
    raise ValueError(f"unknown method {method!r}")


def _regularization_strength(method: str, hyper: float) -> float:
    # larger lambda / more negative gamma = stronger
    return -hyper if method == "vg" else hyper


def _val_error(fit: FitResult, val: Dataset) -> float:
    r = val.response - estimators.predict(fit.alpha_hat, val.prices)
    return float(r @ r)


def _grid_fits(method: str, train: Dataset, grid: Grid,
               settings: SolverSettings) -> dict[int, FitResult]:
    """One fit per grid index; failed points are missing from the dict."""
    fits: dict[int, FitResult] = {}
    if method == "lasso":
        # descend from the all-zero end, warm-starting; the objective is
        # convex, so this changes iteration counts, not solutions
        order = sorted(range(len(grid.values)),
                       key=lambda i: -grid.values[i])
        warm = None
        for i in order:
            try:
                fit = estimators.lasso_fit(train, grid.values[i], settings,
                                           warm_start=warm)
            except estimators.DivergenceError as exc:
                logger.warning("lasso fit failed at lambda %g: %s",
                               grid.values[i], exc)
                continue
            fits[i] = fit
            warm = fit.alpha_hat
        return fits
    for i, hyper in enumerate(grid.values):
        try:
            fits[i] = _fit(method, train, hyper, settings)
        except (estimators.IllConditionedError,
                estimators.DivergenceError) as exc:
            logger.warning("%s fit failed at hyperparameter %g: %s",
                           method, hyper, exc)
    return fits


def _lasso_informed_init(train: Dataset, val: Dataset,
                         settings: SolverSettings):
    """Pilot initialization for the spike-and-slab solver.

    Fit a lasso path as a pilot estimator, pick the penalty by
    validation error, and seed (m, w, beta) from that estimate. Returns None
    when the pilot fit is unavailable or empty. The pilot path is coarser and
    shallower than the committed lasso grid — penalties below 1e-2 * lambda_max
    give interpolating fits that never win validation but dominate runtime.
    """
    try:
        lmax = lambda_max(train)
        if lmax <= 0:
            return None
        pilot_grid = Grid(values=tuple(
            float(v) for v in np.geomspace(1e-2 * lmax, lmax, 20)),
            scale="log")
        pilot, _, _ = select("lasso", train, val, pilot_grid, settings)
    except (ValueError, RuntimeError) as exc:
        logger.warning("lasso pilot for vg initialization failed: %s", exc)
        return None
    on = np.abs(pilot.alpha_hat) > 1e-8
    if not np.any(on):
        return None
    m0 = np.where(on, 0.999, 0.001)
    w0 = np.where(on, pilot.alpha_hat / 0.999, 0.0)
    residual = train.response - train.prices @ (m0 * w0)
    beta0 = train.n_samples / float(residual @ residual)
    return m0, w0, beta0


def _vg_refine(train: Dataset, val: Dataset, grid: Grid,
               settings: SolverSettings, fits: dict[int, FitResult]) -> None:
    """Multi-start search over the gamma grid, keeping the better fixed point.

    The free energy has hysteresis in gamma: the cold start gets trapped on
    the empty branch (strongly negative gamma) or the interpolating branch
    (gamma near zero) and never reaches the well-fitting one. Two extra start
    families are tried at each grid point: a lasso-informed pilot start and
    warm-start chains running from the most promising point toward both grid
    ends. Competing fixed points at the same gamma are compared by validation
    error: with fewer samples than consumers the free energy is unbounded
    below on interpolating branches (beta diverges as the training residual
    vanishes), so it cannot arbitrate between branches.
    """
    if not fits:
        return

    def offer(i: int, candidate: FitResult) -> None:
        kept = fits.get(i)
        if kept is None or _val_error(candidate, val) < _val_error(kept, val):
            fits[i] = candidate

    init = _lasso_informed_init(train, val, settings)
    if init is not None:
        for i in range(len(grid.values)):
            offer(i, estimators.vg_fit(train, grid.values[i], settings,
                                       init=init))

    anchor = min(fits, key=lambda i: (_val_error(fits[i], val), i))

    def chain(indices):
        prev = fits[anchor]
        for i in indices:
            warm = estimators.vg_fit(train, grid.values[i], settings,
                                     init=(prev.m, prev.w, prev.beta_hat))
            offer(i, warm)
            prev = fits[i]

    chain(range(anchor - 1, -1, -1))
    chain(range(anchor + 1, len(grid.values)))


def select(method: str, train: Dataset, val: Dataset, grid: Grid,
           settings: SolverSettings = DEFAULT_SETTINGS,
           ) -> tuple[FitResult, float, list[tuple[float, float]]]:
    """Grid search returning (best fit, best hyperparameter, full table).

    The table lists (hyperparameter, validation error) for every grid point
    that fit successfully, in grid order; failed points are skipped and
    logged. Raises if every point fails. Ties on validation error go to the
    sparser solution, then to the stronger regularization.
    """
    fits = _grid_fits(method, train, grid, settings)
    if method == "vg":
        _vg_refine(train, val, grid, settings, fits)
    if not fits:
        raise RuntimeError(f"all {len(grid.values)} grid points failed for {method}")

    best: FitResult | None = None
    best_hyper = float("nan")
    best_key: tuple | None = None
    table: list[tuple[float, float]] = []
    for i in sorted(fits):
        hyper = grid.values[i]
        fit = fits[i]
        val_error = _val_error(fit, val)
        table.append((float(hyper), val_error))
        key = (val_error, fit.n_nonzero, -_regularization_strength(method, hyper))
        if best_key is None or key < best_key:
            best, best_hyper, best_key = fit, float(hyper), key
    return best, best_hyper, table
