"""Sweep harness: sample-complexity and SNR experiments over seeded instances.

A sweep runs a grid of T/N ratios (samples sweep) or signal-to-noise ratios
(snr sweep), with several random instances per grid point and every requested
method fit via validation-set selection. Cells are seeded independently with
a stable hash so that adding grid points never perturbs existing cells.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import estimators, metrics, selection
from .estimators import SolverSettings, DEFAULT_SETTINGS
from .scenario import ScenarioConfig, generate_scenario

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "CellSummary",
    "cell_seed",
    "run_sweep",
    "aggregate",
    "write_csv",
    "write_summary_csv",
    "read_csv",
]

logger = logging.getLogger(__name__)

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def cell_seed(master_seed: int, grid_index: int, instance_index: int) -> int:
    """Stable 64-bit mix of (master seed, grid index, instance index)."""
    h = _splitmix64(master_seed & _MASK)
    h = _splitmix64(h ^ grid_index)
    h = _splitmix64(h ^ instance_index)
    return h


@dataclass(frozen=True)
class SweepSpec:
    """One experiment: a grid of T/N ratios or SNR values.

    Samples sweeps fix sigma_p and vary T = round(ratio * N); snr sweeps fix
    T and derive sigma_p from the target SNR.
    """

    sweep_kind: str  # "samples" or "snr"
    n_consumers: int
    active_fraction: float
    grid: tuple[float, ...]
    elasticity_value: float = 1.0
    sigma_p: float | None = None  # samples sweeps
    fixed_t: int | None = None  # snr sweeps
    n_instances: int = 10
    master_seed: int = 0
    methods: tuple[str, ...] = ("ridge", "lasso", "vg")

    def __post_init__(self):
        if self.sweep_kind not in ("samples", "snr"):
            raise ValueError(f"unknown sweep_kind {self.sweep_kind!r}")
        if not self.grid or np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be non-empty and strictly increasing")
        if self.n_instances <= 0 or self.n_consumers <= 0:
            raise ValueError("n_consumers and n_instances must be positive")
        unknown = set(self.methods) - set(selection.METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.sweep_kind == "samples":
            if self.sigma_p is None or self.sigma_p <= 0:
                raise ValueError("samples sweeps need a positive sigma_p")
            for ratio in self.grid:
                if round(ratio * self.n_consumers) < 2:
                    raise ValueError(
                        f"ratio {ratio} yields fewer than 2 training samples"
                    )
        else:
            if self.fixed_t is None or self.fixed_t < 2:
                raise ValueError("snr sweeps need fixed_t >= 2")

    def scenario_config(self, grid_value: float, seed: int) -> ScenarioConfig:
        if self.sweep_kind == "samples":
            return ScenarioConfig(
                n_consumers=self.n_consumers,
                n_samples=int(round(grid_value * self.n_consumers)),
                active_fraction=self.active_fraction,
                elasticity_value=self.elasticity_value,
                sigma_p=self.sigma_p,
                seed=seed,
            )
        return ScenarioConfig(
            n_consumers=self.n_consumers,
            n_samples=int(self.fixed_t),
            active_fraction=self.active_fraction,
            elasticity_value=self.elasticity_value,
            target_snr=grid_value,
            seed=seed,
        )


@dataclass
class SweepRecord:
    """One CSV row: one method on one seeded instance at one grid point."""

    method: str
    sweep_kind: str
    n_consumers: int
    active_fraction: float
    grid_value: float
    T: int
    sigma_p: float
    instance_index: int
    seed: int
    selected_hyperparameter: float
    generalization_error: float
    oracle_generalization_error: float
    roc_auc: float
    reconstruction_error: float
    n_nonzero: int
    fit_milliseconds: float
    converged: bool
    failed: bool
    # sidecar data for verbose output, not part of the CSV schema
    selection_table: list = field(default_factory=list, repr=False, compare=False)
    roc_auc_abs: float = field(default=math.nan, repr=False, compare=False)


CSV_FIELDS = [
    "method", "sweep_kind", "n_consumers", "active_fraction", "grid_value",
    "T", "sigma_p", "instance_index", "seed", "selected_hyperparameter",
    "generalization_error", "oracle_generalization_error", "roc_auc",
    "reconstruction_error", "n_nonzero", "fit_milliseconds", "converged",
    "failed",
]


def _run_cell(spec: SweepSpec, grid_index: int, instance_index: int,
              settings: SolverSettings) -> list[SweepRecord]:
    grid_value = spec.grid[grid_index]
    seed = cell_seed(spec.master_seed, grid_index, instance_index)
    config = spec.scenario_config(grid_value, seed)
    train, val, truth = generate_scenario(config)
    records = []
    for method in spec.methods:
        base = SweepRecord(
            method=method,
            sweep_kind=spec.sweep_kind,
            n_consumers=spec.n_consumers,
            active_fraction=spec.active_fraction,
            grid_value=float(grid_value),
            T=config.n_samples,
            sigma_p=truth.sigma_p,
            instance_index=instance_index,
            seed=seed,
            selected_hyperparameter=math.nan,
            generalization_error=math.nan,
            oracle_generalization_error=math.nan,
            roc_auc=math.nan,
            reconstruction_error=math.nan,
            n_nonzero=0,
            fit_milliseconds=0.0,
            converged=False,
            failed=False,
        )
        t0 = time.perf_counter()
        try:
            if method == "ols":
                fit = estimators.ols_fit(train)
                hyper, table = math.nan, []
            else:
                grid = selection.default_grid(method, train)
                fit, hyper, table = selection.select(method, train, val, grid,
                                                     settings)
        except Exception as exc:
            logger.warning("cell (grid=%g, instance=%d, method=%s) failed: %s",
                           grid_value, instance_index, method, exc)
            base.failed = True
            base.fit_milliseconds = (time.perf_counter() - t0) * 1e3
            records.append(base)
            continue
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        report = metrics.evaluate(fit.alpha_hat, val, truth.alpha_star,
                                  truth.active_mask)
        base.selected_hyperparameter = hyper
        base.generalization_error = report.generalization_error
        base.oracle_generalization_error = report.oracle_generalization_error
        base.roc_auc = report.roc_auc
        base.reconstruction_error = report.reconstruction_error
        base.n_nonzero = fit.n_nonzero
        base.fit_milliseconds = elapsed_ms
        base.converged = fit.converged
        base.selection_table = table
        base.roc_auc_abs = metrics.roc_auc(np.abs(fit.alpha_hat),
                                           truth.active_mask)
        records.append(base)
    return records


def run_sweep(spec: SweepSpec, jobs: int = 1,
              settings: SolverSettings = DEFAULT_SETTINGS) -> list[SweepRecord]:
    """Run every (grid value, instance, method) cell of a sweep.

    Cells are independent and may run on up to ``jobs`` threads; output order
    is always grid-major, instance-minor, methods as listed, regardless of
    scheduling.
    """
    tasks = [(gi, ii) for gi in range(len(spec.grid))
             for ii in range(spec.n_instances)]
    if jobs <= 1:
        cell_results = [_run_cell(spec, gi, ii, settings) for gi, ii in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cell_results = list(pool.map(
                lambda t: _run_cell(spec, t[0], t[1], settings), tasks))
    return [rec for cell in cell_results for rec in cell]


@dataclass(frozen=True)
class CellSummary:
    """Median and nearest-rank quartiles per metric for one (method, grid) cell."""

    method: str
    grid_value: float
    n: int
    generalization_error: tuple[float, float, float]  # (q25, median, q75)
    oracle_generalization_error: tuple[float, float, float]
    roc_auc: tuple[float, float, float]
    reconstruction_error: tuple[float, float, float]


_SUMMARY_METRICS = ("generalization_error", "oracle_generalization_error",
                    "roc_auc", "reconstruction_error")


def _nearest_rank(sorted_vals: np.ndarray, pct: float) -> float:
    idx = max(1, math.ceil(pct / 100.0 * len(sorted_vals)))
    return float(sorted_vals[idx - 1])


def _three_point(values: list[float]) -> tuple[float, float, float]:
    arr = np.sort(np.asarray(values, dtype=np.float64))
    return (_nearest_rank(arr, 25.0), float(np.median(arr)),
            _nearest_rank(arr, 75.0))


def aggregate(records: list[SweepRecord]) -> list[CellSummary]:
    """Per-(method, grid value) medians with 25th/75th percentile bands.

    Failed records are excluded. Output order follows first appearance in
    the input, which is deterministic for run_sweep output.
    """
    if not records:
        raise ValueError("no records to aggregate")
    groups: dict[tuple[str, float], list[SweepRecord]] = {}
    for rec in records:
        if rec.failed:
            continue
        groups.setdefault((rec.method, rec.grid_value), []).append(rec)
    summaries = []
    for (method, grid_value), recs in groups.items():
        stats = {name: _three_point([getattr(r, name) for r in recs])
                 for name in _SUMMARY_METRICS}
        summaries.append(CellSummary(method=method, grid_value=grid_value,
                                     n=len(recs), **stats))
    return summaries


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_metadata(path: Path, spec, deterministic: bool) -> None:
    meta = {
        "spec": asdict(spec) if spec is not None else None,
        "tool_version": __version__,
        "timestamp": "" if deterministic else time.strftime(
            "%Y-%m-%dT%H:%M:%S%z"),
        "deterministic": deterministic,
    }
    path.write_text(json.dumps(meta, indent=2, default=list) + "\n",
                    encoding="utf-8")


def write_csv(records: list[SweepRecord], path, spec: SweepSpec | None = None,
              deterministic: bool = False) -> None:
    """Write records as UTF-8 CSV with a sibling .meta.json file.

    ``deterministic`` zeroes the timing column and the metadata timestamp so
    repeated runs are byte-identical.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for rec in records:
            if deterministic:
                rec = replace(rec, fit_milliseconds=0.0)
            writer.writerow([_fmt(getattr(rec, name)) for name in CSV_FIELDS])
    _write_metadata(path.with_suffix(path.suffix + ".meta.json"), spec,
                    deterministic)


def write_summary_csv(summaries: list[CellSummary], path,
                      spec: SweepSpec | None = None,
                      deterministic: bool = False) -> None:
    path = Path(path)
    header = ["method", "grid_value", "n"]
    for name in _SUMMARY_METRICS:
        header += [f"{name}_q25", f"{name}_median", f"{name}_q75"]
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in summaries:
            row = [s.method, _fmt(s.grid_value), s.n]
            for name in _SUMMARY_METRICS:
                row += [_fmt(v) for v in getattr(s, name)]
            writer.writerow(row)
    _write_metadata(path.with_suffix(path.suffix + ".meta.json"), spec,
                    deterministic)


def read_csv(path) -> list[SweepRecord]:
    """Read back a records CSV written by write_csv."""
    records = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(SweepRecord(
                method=row["method"],
                sweep_kind=row["sweep_kind"],
                n_consumers=int(row["n_consumers"]),
                active_fraction=float(row["active_fraction"]),
                grid_value=float(row["grid_value"]),
                T=int(row["T"]),
                sigma_p=float(row["sigma_p"]),
                instance_index=int(row["instance_index"]),
                seed=int(row["seed"]),
                selected_hyperparameter=float(row["selected_hyperparameter"]),
                generalization_error=float(row["generalization_error"]),
                oracle_generalization_error=float(
                    row["oracle_generalization_error"]),
                roc_auc=float(row["roc_auc"]),
                reconstruction_error=float(row["reconstruction_error"]),
                n_nonzero=int(row["n_nonzero"]),
                fit_milliseconds=float(row["fit_milliseconds"]),
                converged=row["converged"] == "true",
                failed=row["failed"] == "true",
            ))
    return records
