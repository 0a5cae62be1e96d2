"""Command-line interface.

Subcommands:
    single        generate one scenario, fit one method, print the metrics
    sweep-samples run a T/N sweep and write records/summary CSVs
    sweep-snr     run an SNR sweep and write records/summary CSVs
    plot          render the three-panel SVG from an existing records CSV

Exit codes: 0 success, 1 usage error, 2 runtime failure. A plain
``key = value`` file may be passed via --config; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

from . import estimators, harness, metrics, selection
from .harness import SweepSpec
from .scenario import ScenarioConfig, generate_scenario

logger = logging.getLogger(__name__)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _method_list(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    for m in methods:
        if m not in selection.METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}")
    return methods


def _add_common(p: _Parser) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="key = value file supplying defaults")
    p.add_argument("--n", type=int, default=500, help="number of consumers")
    p.add_argument("--active-fraction", type=float, default=0.1)
    p.add_argument("--elasticity", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", action="store_true")


def _add_sweep_common(p: _Parser) -> None:
    _add_common(p)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--methods", type=_method_list, default=["ridge", "lasso", "vg"])
    # required, but validated after --config merging so a config file can
    # supply it
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--jobs", type=int, default=1,
                   help="max concurrent sweep cells")
    p.add_argument("--deterministic", action="store_true",
                   help="zero timing/timestamp columns for byte-stable output")


def build_parser() -> _Parser:
    parser = _Parser(prog="demandlearn",
                     description="price-elasticity estimation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", parents=[], help="one scenario, one method")
    _add_common(p)
    p.add_argument("--t", type=int, default=None, help="training samples")
    p.add_argument("--sigma-p", type=float, default=None)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--method", choices=selection.METHODS, default="vg")

    p = sub.add_parser("sweep-samples", help="sweep over T/N ratios")
    _add_sweep_common(p)
    p.add_argument("--grid", type=_float_list,
                   default=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
                   help="comma-separated T/N ratios")
    p.add_argument("--sigma-p", type=float, default=1.0)

    p = sub.add_parser("sweep-snr", help="sweep over log10 SNR values")
    _add_sweep_common(p)
    p.add_argument("--grid", type=_float_list,
                   default=[-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
                   help="comma-separated log10 SNR values")
    p.add_argument("--t", type=int, default=None,
                   help="fixed training samples")

    p = sub.add_parser("plot", help="render SVG panels from a records CSV")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--records", type=Path, default=None)
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--verbose", action="store_true")
    return parser


def _load_config(path: Path) -> dict:
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: _Parser, argv: list[str]) -> argparse.Namespace:
    # first parse to find --config, then re-parse with its values as defaults
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    raw = _load_config(args.config)
    defaults = {}
    for key, value in raw.items():
        if key == "grid":
            defaults[key] = _float_list(value)
        elif key == "methods":
            defaults[key] = _method_list(value)
        elif key in ("n", "t", "instances", "seed", "jobs"):
            defaults[key] = int(value)
        elif key in ("verbose", "deterministic"):
            defaults[key] = value.lower() in ("1", "true", "yes")
        elif key in ("out", "records"):
            defaults[key] = Path(value)
        else:
            defaults[key] = float(value)
    # subcommands parse into their own namespace, so defaults must be set on
    # every subparser, not just the root
    parser.set_defaults(**defaults)
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise _UsageError(f"--{name} is required "
                              "(flag or config file entry)")


def _run_single(args) -> int:
    _require(args, "t")
    if (args.sigma_p is None) == (args.snr is None):
        raise _UsageError("single: give exactly one of --sigma-p / --snr")
    config = ScenarioConfig(
        n_consumers=args.n, n_samples=args.t,
        active_fraction=args.active_fraction,
        elasticity_value=args.elasticity,
        sigma_p=args.sigma_p, target_snr=args.snr, seed=args.seed,
    )
    train, val, truth = generate_scenario(config)
    if args.method == "ols":
        fit, hyper = estimators.ols_fit(train), math.nan
    else:
        grid = selection.default_grid(args.method, train)
        fit, hyper, _ = selection.select(args.method, train, val, grid)
    report = metrics.evaluate(fit.alpha_hat, val, truth.alpha_star,
                              truth.active_mask)
    print(f"method: {args.method}")
    print(f"selected_hyperparameter: {hyper:.6g}")
    print(f"generalization_error: {report.generalization_error:.6g}")
    print(f"oracle_generalization_error: "
          f"{report.oracle_generalization_error:.6g}")
    print(f"roc_auc: {report.roc_auc:.6g}")
    print(f"reconstruction_error: {report.reconstruction_error:.6g}")
    print(f"n_nonzero: {fit.n_nonzero}")
    print(f"converged: {fit.converged}")
    return 0


def _write_verbose_sidecars(records, out_dir: Path) -> None:
    with (out_dir / "selection_tables.csv").open("w", encoding="utf-8",
                                                 newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "grid_value", "instance_index",
                         "hyperparameter", "validation_error"])
        for rec in records:
            for hyper, err in rec.selection_table:
                writer.writerow([rec.method, f"{rec.grid_value:.17g}",
                                 rec.instance_index, f"{hyper:.17g}",
                                 f"{err:.17g}"])
    with (out_dir / "auc_variants.csv").open("w", encoding="utf-8",
                                             newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "grid_value", "instance_index",
                         "roc_auc_signed", "roc_auc_abs"])
        for rec in records:
            writer.writerow([rec.method, f"{rec.grid_value:.17g}",
                             rec.instance_index, f"{rec.roc_auc:.17g}",
                             f"{rec.roc_auc_abs:.17g}"])


def _run_sweep_command(args, sweep_kind: str) -> int:
    _require(args, "out")
    if sweep_kind == "snr":
        _require(args, "t")
    spec = SweepSpec(
        sweep_kind=sweep_kind,
        n_consumers=args.n,
        active_fraction=args.active_fraction,
        grid=tuple(args.grid),
        elasticity_value=args.elasticity,
        sigma_p=args.sigma_p if sweep_kind == "samples" else None,
        fixed_t=args.t if sweep_kind == "snr" else None,
        n_instances=args.instances,
        master_seed=args.seed,
        methods=tuple(args.methods),
    )
    records = harness.run_sweep(spec, jobs=args.jobs)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_csv(records, out_dir / "records.csv", spec=spec,
                      deterministic=args.deterministic)
    summaries = harness.aggregate(records)
    harness.write_summary_csv(summaries, out_dir / "summary.csv", spec=spec,
                              deterministic=args.deterministic)
    if args.verbose:
        _write_verbose_sidecars(records, out_dir)
    print(f"wrote {len(records)} records to {out_dir / 'records.csv'}")
    return 0


def _run_plot(args) -> int:
    from .plots import render_plots  # deferred: pulls in matplotlib

    _require(args, "records", "out")
    records = harness.read_csv(args.records)
    if not records:
        raise RuntimeError(f"no records in {args.records}")
    summaries = harness.aggregate(records)
    kind = records[0].sweep_kind
    x_label = "T/N" if kind == "samples" else "SNR (log10)"
    path = render_plots(summaries, args.out, name=f"sweep_{kind}",
                        x_label=x_label)
    print(f"wrote {path}")
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", False)
            else logging.WARNING)
        if args.command == "single":
            return _run_single(args)
        if args.command == "sweep-samples":
            return _run_sweep_command(args, "samples")
        if args.command == "sweep-snr":
            return _run_sweep_command(args, "snr")
        if args.command == "plot":
            return _run_plot(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
