"""Fitting procedures: OLS, ridge, lasso, and the variational garrote.

All fits map a Dataset (plus hyperparameter and solver settings) to a
FitResult holding the estimated elasticities and solver diagnostics. The
variational garrote models each elasticity as a binary switch times a
continuous weight, approximates the posterior over switches with a factorized
distribution parameterized by inclusion probabilities m, and reports the
estimate alpha'_i = m_i * w_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla

from ._kernels import lasso_cd_kernel, vg_kernel
from .scenario import Dataset

__all__ = [
    "FitResult",
    "SolverSettings",
    "IllConditionedError",
    "DivergenceError",
    "ols_fit",
    "ridge_fit",
    "lasso_fit",
    "vg_fit",
    "vg_free_energy",
    "vg_free_energy_gradients",
    "predict",
]

CONDITION_LIMIT = 1e12


class IllConditionedError(ValueError):
    """The normal equations are numerically singular."""


class DivergenceError(ArithmeticError):
    """An iterative solver produced non-finite values."""


@dataclass(frozen=True)
class SolverSettings:
    """Iteration budget and tolerances shared by lasso and VG solvers."""

    max_iterations: int = 10_000
    tolerance: float = 1e-8
    m_clip: float = 1e-12

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.m_clip < 0.5:
            raise ValueError("m_clip must lie in (0, 0.5)")


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class FitResult:
    """Estimated elasticities plus solver diagnostics.

    ``m``, ``w`` and ``beta_hat`` are populated by the variational garrote
    only; ``hyperparameter`` is NaN for OLS. ``objective_history`` holds the
    VG free energy after each full sweep when available.
    """

    alpha_hat: NDArray[np.float64]
    hyperparameter: float
    iterations: int
    final_objective: float
    converged: bool
    beta_hat: float | None = None
    m: NDArray[np.float64] | None = None
    w: NDArray[np.float64] | None = None
    objective_history: NDArray[np.float64] | None = None

    @property
    def n_nonzero(self) -> int:
        return int(np.sum(np.abs(self.alpha_hat) > 1e-8))


def _design(data: Dataset) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    X = np.asfortranarray(data.prices)
    y = np.ascontiguousarray(data.response)
    return X, y


def _sse(X, y, alpha) -> float:
    r = y - X @ alpha
    return float(r @ r)


def _solve_normal_equations(gram, rhs):
    """Solve a symmetric positive-definite system, or raise IllConditionedError."""
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise IllConditionedError(
            f"normal equations condition number exceeds {CONDITION_LIMIT:g}"
        )
    try:
        cho = sla.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - cond check first
        raise IllConditionedError(str(exc)) from exc
    alpha = sla.cho_solve(cho, rhs)
    resid = gram @ alpha - rhs
    scale = np.linalg.norm(rhs)
    if scale > 0 and np.linalg.norm(resid) / scale > 1e-8:
        raise IllConditionedError("normal-equations residual too large")
    return alpha


def ols_fit(data: Dataset) -> FitResult:
    """Ordinary least squares via the empirical covariance system."""
    X, y = _design(data)
    T = X.shape[0]
    chi = (X.T @ X) / T
    b = (X.T @ y) / T
    alpha = _solve_normal_equations(chi, b)
    return FitResult(
        alpha_hat=alpha,
        hyperparameter=math.nan,
        iterations=0,
        final_objective=0.5 * _sse(X, y, alpha),
        converged=True,
    )


def ridge_fit(data: Dataset, lam: float) -> FitResult:
    """Minimizer of 0.5*||y - X a||^2 + (lam/2)*||a||^2."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    X, y = _design(data)
    n = X.shape[1]
    gram = X.T @ X + lam * np.eye(n)
    alpha = _solve_normal_equations(gram, X.T @ y)
    objective = 0.5 * _sse(X, y, alpha) + 0.5 * lam * float(alpha @ alpha)
    return FitResult(
        alpha_hat=alpha,
        hyperparameter=float(lam),
        iterations=0,
        final_objective=objective,
        converged=True,
    )


def lasso_fit(data: Dataset, lam: float,
              settings: SolverSettings = DEFAULT_SETTINGS,
              warm_start=None) -> FitResult:
    """Minimizer of 0.5*||y - X a||^2 + lam*||a||_1 by coordinate descent.

    ``warm_start`` seeds the iteration (e.g. the solution at a nearby
    penalty); the objective is convex so it only changes the iteration count.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    X, y = _design(data)
    alpha0 = (np.zeros(X.shape[1]) if warm_start is None
              else np.asarray(warm_start, dtype=np.float64).copy())
    alpha, iterations, converged = lasso_cd_kernel(
        X, y, float(lam), settings.max_iterations, settings.tolerance, alpha0
    )
    objective = 0.5 * _sse(X, y, alpha) + lam * float(np.sum(np.abs(alpha)))
    return FitResult(
        alpha_hat=alpha,
        hyperparameter=float(lam),
        iterations=iterations,
        final_objective=objective,
        converged=converged,
    )


def vg_free_energy(data: Dataset, m, w, beta: float, gamma: float) -> float:
    """Variational free energy of the spike-and-slab model.

    F = (beta/2) * sum_t r(t)^2
      + (beta/2) * sum_i m_i (1 - m_i) w_i^2 S_i
      - (T/2) * ln(beta / 2pi)
      - sum_i [gamma * m_i - ln(1 + e^gamma)]
      + sum_i [m_i ln m_i + (1 - m_i) ln(1 - m_i)]

    with S_i the squared norm of column i and the convention 0*ln 0 = 0.
    """
    m = np.asarray(m, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if np.any(m < 0) or np.any(m > 1):
        raise ValueError("m must lie in [0, 1]")
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(w)) and np.isfinite(gamma)):
        raise ValueError("non-finite inputs")
    X = data.prices
    y = data.response
    T, n = X.shape
    col_sq = np.einsum("ti,ti->i", X, X)
    r = y - X @ (m * w)
    fit_term = 0.5 * beta * float(r @ r)
    var_term = 0.5 * beta * float(np.sum(m * (1.0 - m) * w * w * col_sq))
    norm_term = -0.5 * T * math.log(beta / (2.0 * math.pi))
    prior_term = -float(np.sum(gamma * m)) + n * float(np.logaddexp(0.0, gamma))
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = np.where(m > 0, m * np.log(m), 0.0)
        ent = ent + np.where(m < 1, (1.0 - m) * np.log1p(-m), 0.0)
    entropy_term = float(np.sum(ent))
    return fit_term + var_term + norm_term + prior_term + entropy_term


def vg_free_energy_gradients(data: Dataset, m, w, beta: float, gamma: float):
    """Analytic partials (dF/dm, dF/dw, dF/dbeta) of vg_free_energy.

    dF/dm_i requires 0 < m_i < 1 (the entropy term has infinite slope at the
    boundary).
    """
    m = np.asarray(m, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    X = data.prices
    y = data.response
    T = X.shape[0]
    col_sq = np.einsum("ti,ti->i", X, X)
    r = y - X @ (m * w)
    corr = X.T @ r
    dm = (-beta * w * corr + 0.5 * beta * (1.0 - 2.0 * m) * w * w * col_sq
          - gamma + np.log(m / (1.0 - m)))
    dw = beta * m * (-corr + (1.0 - m) * w * col_sq)
    dbeta = (0.5 * float(r @ r)
             + 0.5 * float(np.sum(m * (1.0 - m) * w * w * col_sq))
             - 0.5 * T / beta)
    return dm, dw, dbeta


def vg_fit(data: Dataset, gamma: float,
           settings: SolverSettings = DEFAULT_SETTINGS,
           init: tuple | None = None) -> FitResult:
    """Variational garrote fit at sparsity level gamma.

    Cyclic fixed-point updates: w_i <- c_i/S_i then
    m_i <- sigmoid(gamma + beta c_i^2 / (2 S_i)) clamped to
    [m_clip, 1-m_clip], with a noise-precision update after each sweep. Both
    updates are exact coordinate minimizers of vg_free_energy, so the free
    energy is non-increasing across sweeps.

    ``init`` is an optional (m0, w0, beta0) warm start; the default is the
    uninformative m = 0.5, w = 0, beta = T / sum(P^2). The free energy has
    multiple fixed points at strongly negative gamma, so callers scanning a
    gamma grid should warm-start from neighboring solutions and keep the
    lowest-free-energy result (see selection).
    """
    X, y = _design(data)
    T, n = X.shape
    col_sq = np.einsum("ti,ti->i", X, X)
    if np.any(col_sq <= 0):
        raise ValueError("every price column must have positive energy")
    if init is None:
        m0 = np.full(n, 0.5)
        w0 = np.zeros(n)
        y_sq = float(y @ y)
        beta0 = T / y_sq if y_sq > 0 else 1e15
    else:
        m0, w0, beta0 = init
        m0 = np.clip(np.asarray(m0, dtype=np.float64),
                     settings.m_clip, 1.0 - settings.m_clip)
        w0 = np.asarray(w0, dtype=np.float64)
        beta0 = float(beta0)
    m, w, beta, iterations, converged, fe_hist = vg_kernel(
        X, y, float(gamma), settings.m_clip, settings.max_iterations,
        settings.tolerance, m0, w0, beta0,
    )
    if fe_hist.size and not np.isfinite(fe_hist[-1]):
        raise DivergenceError("variational free energy became non-finite")
    return FitResult(
        alpha_hat=m * w,
        hyperparameter=float(gamma),
        iterations=iterations,
        final_objective=float(fe_hist[-1]) if fe_hist.size else math.nan,
        converged=converged,
        beta_hat=float(beta),
        m=m,
        w=w,
        objective_history=fe_hist,
    )


def predict(alpha_hat, prices) -> NDArray[np.float64]:
    """Predicted aggregate response for each row of the price matrix."""
    alpha_hat = np.asarray(alpha_hat, dtype=np.float64)
    prices = np.asarray(prices, dtype=np.float64)
    if prices.ndim != 2 or prices.shape[1] != alpha_hat.shape[0]:
        raise ValueError(
            f"prices shape {prices.shape} incompatible with "
            f"{alpha_hat.shape[0]} coefficients"
        )
    return prices @ alpha_hat
