"""Static SVG figures: three stacked panels per sweep.

Top panel: generalization error (log y) per method plus the true-elasticity
'Opt' baseline. Middle: ROC AUC (linear y). Bottom: reconstruction error
(log y).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import CellSummary

__all__ = ["render_plots"]

_COLORS = {"ols": "tab:purple", "ridge": "tab:blue", "lasso": "tab:green",
           "vg": "tab:red"}
_LABELS = {"ols": "OLS", "ridge": "ridge", "lasso": "lasso", "vg": "l0 (VG)"}


def _series(summaries: list[CellSummary], method: str, metric: str):
    pts = sorted((s.grid_value, getattr(s, metric)) for s in summaries
                 if s.method == method)
    xs = [p[0] for p in pts]
    q25 = [p[1][0] for p in pts]
    med = [p[1][1] for p in pts]
    q75 = [p[1][2] for p in pts]
    return xs, q25, med, q75


def render_plots(summaries: list[CellSummary], out_dir, name: str = "sweep",
                 x_label: str = "T/N") -> Path:
    """Render one SVG for a sweep's summaries; returns the file path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = sorted({s.method for s in summaries},
                     key=lambda m: list(_COLORS).index(m))

    fig, axes = plt.subplots(3, 1, figsize=(6, 9), sharex=True)
    panel = [
        ("generalization_error", "Generalization error", "log"),
        ("roc_auc", "ROC AUC", "linear"),
        ("reconstruction_error", "Reconstruction error", "log"),
    ]
    for ax, (metric, title, yscale) in zip(axes, panel):
        for method in methods:
            xs, q25, med, q75 = _series(summaries, method, metric)
            color = _COLORS[method]
            ax.plot(xs, med, "-o", ms=3, color=color, label=_LABELS[method])
            ax.fill_between(xs, q25, q75, color=color, alpha=0.15, lw=0)
        if metric == "generalization_error" and methods:
            xs, _, med, _ = _series(summaries, methods[0],
                                    "oracle_generalization_error")
            ax.plot(xs, med, "-", color="black", label="Opt")
        ax.set_yscale(yscale)
        ax.set_ylabel(title)
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="best", fontsize=8)
    axes[-1].set_xlabel(x_label)
    fig.tight_layout()
    path = out_dir / f"{name}.svg"
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
