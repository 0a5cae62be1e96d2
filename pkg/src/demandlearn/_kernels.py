"""Numba inner loops for the iterative solvers.

Both kernels expect the design matrix in Fortran order so that column slices
are contiguous. They are deterministic: cyclic coordinate order, no RNG.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Cap keeps the free energy finite when the residual collapses to zero
# (noiseless data); never reached on noisy instances.
_BETA_CAP = 1e15


@njit(cache=True, nogil=True)
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True, nogil=True)
def lasso_cd_kernel(X, y, lam, max_iter, tol, alpha0):
    """Cyclic coordinate descent for 0.5*||y - X a||^2 + lam*||a||_1.

    Returns (alpha, iterations, converged). The objective is convex, so the
    starting point alpha0 affects speed only, not the solution.
    """
    T, N = X.shape
    col_sq = np.empty(N)
    for i in range(N):
        s = 0.0
        for t in range(T):
            s += X[t, i] * X[t, i]
        col_sq[i] = s

    alpha = alpha0.copy()
    r = y - X @ alpha
    it = 0
    for it in range(1, max_iter + 1):
        max_delta = 0.0
        for i in range(N):
            if col_sq[i] == 0.0:
                continue
            c = alpha[i] * col_sq[i]
            for t in range(T):
                c += X[t, i] * r[t]
            if c > lam:
                a_new = (c - lam) / col_sq[i]
            elif c < -lam:
                a_new = (c + lam) / col_sq[i]
            else:
                a_new = 0.0
            d = a_new - alpha[i]
            if d != 0.0:
                for t in range(T):
                    r[t] -= d * X[t, i]
                alpha[i] = a_new
                if abs(d) > max_delta:
                    max_delta = abs(d)
        if max_delta < tol:
            return alpha, it, True
    return alpha, it, False


@njit(cache=True, nogil=True)
def vg_kernel(X, y, gamma, m_clip, max_iter, tol, m0, w0, beta0):
    """Fixed-point iteration for the spike-and-slab variational objective.

    Per coordinate: w_i <- c_i / S_i, m_i <- sigmoid(gamma + beta*c_i^2/(2 S_i))
    clamped to [m_clip, 1 - m_clip], with c_i the correlation of column i with
    the residual excluding coordinate i. After each full sweep
    beta <- T / (||r||^2 + sum_i m_i (1-m_i) w_i^2 S_i).

    Returns (m, w, beta, iterations, converged, free_energy_history).
    """
    T, N = X.shape
    col_sq = np.empty(N)
    for i in range(N):
        s = 0.0
        for t in range(T):
            s += X[t, i] * X[t, i]
        col_sq[i] = s

    m = m0.copy()
    w = w0.copy()
    beta = beta0
    r = y - X @ (m * w)
    log1p_eg = np.logaddexp(0.0, gamma)
    fe_hist = np.empty(max_iter)
    it = 0
    for it in range(1, max_iter + 1):
        max_delta = 0.0
        for i in range(N):
            if col_sq[i] == 0.0:
                continue
            a_old = m[i] * w[i]
            c = a_old * col_sq[i]
            for t in range(T):
                c += X[t, i] * r[t]
            w_new = c / col_sq[i]
            m_new = _sigmoid(gamma + beta * c * c / (2.0 * col_sq[i]))
            if m_new < m_clip:
                m_new = m_clip
            elif m_new > 1.0 - m_clip:
                m_new = 1.0 - m_clip
            dw = abs(w_new - w[i])
            dm = abs(m_new - m[i])
            if dw > max_delta:
                max_delta = dw
            if dm > max_delta:
                max_delta = dm
            a_new = m_new * w_new
            d = a_new - a_old
            if d != 0.0:
                for t in range(T):
                    r[t] -= d * X[t, i]
            m[i] = m_new
            w[i] = w_new

        rss = 0.0
        for t in range(T):
            rss += r[t] * r[t]
        var_term = 0.0
        for i in range(N):
            var_term += m[i] * (1.0 - m[i]) * w[i] * w[i] * col_sq[i]
        denom = rss + var_term
        beta = T / denom if denom > T / _BETA_CAP else _BETA_CAP

        # free energy after the beta update; terms mirror vg_free_energy
        fe = 0.5 * beta * (rss + var_term) - 0.5 * T * np.log(beta / (2.0 * np.pi))
        for i in range(N):
            fe -= gamma * m[i] - log1p_eg
            fe += m[i] * np.log(m[i]) + (1.0 - m[i]) * np.log(1.0 - m[i])
        fe_hist[it - 1] = fe
        if not np.isfinite(fe):
            return m, w, beta, it, False, fe_hist[:it]

        if max_delta < tol:
            return m, w, beta, it, True, fe_hist[:it]
    return m, w, beta, it, False, fe_hist[:it]
