"""Evaluation metrics: generalization error, ROC AUC, and reconstruction error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .estimators import predict
from .scenario import Dataset

__all__ = [
    "MetricReport",
    "generalization_error",
    "roc_auc",
    "reconstruction_error",
    "evaluate",
]


class UndefinedAUCError(ValueError):
    """AUC requires at least one active and one inactive consumer."""


@dataclass(frozen=True)
class MetricReport:
    generalization_error: float
    roc_auc: float
    reconstruction_error: float
    oracle_generalization_error: float


def generalization_error(alpha_hat, val: Dataset) -> float:
    """Sum of squared prediction residuals on the validation set."""
    r = val.response - predict(alpha_hat, val.prices)
    return float(r @ r)


def roc_auc(scores, active_mask) -> float:
    """Probability that a random active consumer outranks a random inactive
    one, ties counted half; equal to the area under the ROC curve."""
    scores = np.asarray(scores, dtype=np.float64)
    active_mask = np.asarray(active_mask, dtype=bool)
    if scores.shape != active_mask.shape:
        raise ValueError("scores and mask must have the same length")
    n_active = int(active_mask.sum())
    n_inactive = active_mask.size - n_active
    if n_active == 0 or n_inactive == 0:
        raise UndefinedAUCError("need at least one active and one inactive consumer")
    ranks = rankdata(scores)
    rank_sum = float(ranks[active_mask].sum())
    return (rank_sum - n_active * (n_active + 1) / 2.0) / (n_active * n_inactive)


def reconstruction_error(alpha_hat, alpha_star) -> float:
    """l1 distance between estimated and true elasticities."""
    alpha_hat = np.asarray(alpha_hat, dtype=np.float64)
    alpha_star = np.asarray(alpha_star, dtype=np.float64)
    if alpha_hat.shape != alpha_star.shape:
        raise ValueError("elasticity vectors must have the same length")
    return float(np.sum(np.abs(alpha_hat - alpha_star)))


def evaluate(alpha_hat, val: Dataset, alpha_star, active_mask) -> MetricReport:
    """All three metrics plus the true-elasticity ('Opt') baseline."""
    return MetricReport(
        generalization_error=generalization_error(alpha_hat, val),
        roc_auc=roc_auc(alpha_hat, active_mask),
        reconstruction_error=reconstruction_error(alpha_hat, alpha_star),
        oracle_generalization_error=generalization_error(alpha_star, val),
    )
