"""Jit-compiled filter kernels shared across modules.

The ARMA prediction-error filter is the inner loop of every estimator in the
package (plain, weighted, windowed, Monte-Carlo), so it is compiled with
numba.  The Hamilton filter for the two-regime switching model lives here for
the same reason.  Everything takes plain float64 arrays; wrapping/validation
happens in the public modules.
"""
from __future__ import annotations

import numpy as np
from numba import njit

LOG_2PI = float(np.log(2.0 * np.pi))


@njit(cache=True)
def harvey_system(phi: np.ndarray, theta: np.ndarray):
    """Transition matrix T and shock loading R of the Harvey ARMA form."""
    p = phi.shape[0]
    q = theta.shape[0]
    m = max(p, q + 1)
    T = np.zeros((m, m))
    for i in range(p):
        T[i, 0] = phi[i]
    for i in range(m - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(m)
    R[0] = 1.0
    for j in range(q):
        R[j + 1] = theta[j]
    return T, R


@njit(cache=True)
def stationary_cov(T: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Solve P = T P T' + R R' by the vec trick (unit innovation variance)."""
    m = T.shape[0]
    mm = m * m
    A = np.zeros((mm, mm))
    # A = I - kron(T, T), row (i*m+j), col (k*m+l) is -T[i,k]*T[j,l]
    for i in range(m):
        for j in range(m):
            row = i * m + j
            for k in range(m):
                for l in range(m):
                    A[row, k * m + l] = -T[i, k] * T[j, l]
            A[row, row] += 1.0
    b = np.zeros(mm)
    for i in range(m):
        for j in range(m):
            b[i * m + j] = R[i] * R[j]
    x = np.linalg.solve(A, b)
    P = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            P[i, j] = x[i * m + j]
    # enforce symmetry lost to round-off
    for i in range(m):
        for j in range(i + 1, m):
            s = 0.5 * (P[i, j] + P[j, i])
            P[i, j] = s
            P[j, i] = s
    return P


@njit(cache=True)
def arma_filter(y_dev: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """Kalman prediction-error decomposition for a demeaned ARMA series.

    Returns (v, f, ok): one-step prediction errors v_t, their scale-free
    variances f_t (innovation variance concentrated out, i.e. sigma2 = 1),
    and ok = False when the recursion degenerated numerically.
    """
    n = y_dev.shape[0]
    T, R = harvey_system(phi, theta)
    m = T.shape[0]
    P = stationary_cov(T, R)
    a = np.zeros(m)
    v = np.empty(n)
    f = np.empty(n)
    ok = True
    RR = np.outer(R, R)
    for t in range(n):
        F = P[0, 0]
        if not np.isfinite(F) or F <= 1e-300:
            ok = False
            break
        vt = y_dev[t] - a[0]
        v[t] = vt
        f[t] = F
        # filtered update then one-step prediction, fused:
        # a <- T (a + P[:,0] v/F),  P <- T (P - P[:,0] P[0,:]/F) T' + RR'
        g = P[:, 0] / F
        au = a + g * vt
        Pu = P - np.outer(g, P[0, :])
        a = T @ au
        P = T @ Pu @ T.T + RR
        for i in range(m):
            for j in range(i + 1, m):
                s = 0.5 * (P[i, j] + P[j, i])
                P[i, j] = s
                P[j, i] = s
    return v, f, ok


@njit(cache=True)
def arma_weighted_loglik(y_dev: np.ndarray, phi: np.ndarray, theta: np.ndarray,
                         w: np.ndarray):
    """Weighted exact log-likelihood with the variance concentrated out.

    Per-observation Gaussian contributions l_t are multiplied by w_t; the
    maximizing innovation variance given the other parameters is
    sigma2 = sum(w v^2/f) / sum(w), substituted analytically.
    Returns (loglik, sigma2_hat, ok).
    """
    v, f, ok = arma_filter(y_dev, phi, theta)
    if not ok:
        return -np.inf, 1.0, False
    wsum = 0.0
    s = 0.0
    logf = 0.0
    for t in range(v.shape[0]):
        wsum += w[t]
        s += w[t] * v[t] * v[t] / f[t]
        logf += w[t] * np.log(f[t])
    if wsum <= 0.0 or s <= 0.0:
        return -np.inf, 1.0, False
    sigma2 = s / wsum
    ll = -0.5 * (wsum * LOG_2PI + wsum * np.log(sigma2) + logf + wsum)
    if not np.isfinite(ll):
        return -np.inf, sigma2, False
    return ll, sigma2, True


@njit(cache=True)
def hamilton_filter(y: np.ndarray, alpha: np.ndarray, rho: np.ndarray,
                    sigma2: np.ndarray, P: np.ndarray, xi_init: np.ndarray):
    """Two-regime Hamilton filter for an MS-AR(1).

    y[0] is used only as the first lag; contributions run t = 1..n-1.
    Returns (loglik, filtered) with filtered[t-1, j] = Pr(s_t = j | y_1..y_t).
    """
    n = y.shape[0]
    filtered = np.empty((n - 1, 2))
    # a saturated optimizer step can underflow exp(log sigma2) to exactly
    # zero; bail out with -inf instead of dividing by it below
    if sigma2[0] <= 1e-300 or sigma2[1] <= 1e-300:
        return -np.inf, filtered
    xi_pred = xi_init.copy()
    ll = 0.0
    c0 = -0.5 * LOG_2PI
    for t in range(1, n):
        ft = 0.0
        joint = np.empty(2)
        for j in range(2):
            mu = alpha[j] + rho[j] * y[t - 1]
            e = y[t] - mu
            dens = np.exp(c0 - 0.5 * np.log(sigma2[j]) - 0.5 * e * e / sigma2[j])
            joint[j] = xi_pred[j] * dens
            ft += joint[j]
        if not np.isfinite(ft) or ft <= 1e-300:
            return -np.inf, filtered
        ll += np.log(ft)
        for j in range(2):
            filtered[t - 1, j] = joint[j] / ft
        for j in range(2):
            xi_pred[j] = filtered[t - 1, 0] * P[0, j] + filtered[t - 1, 1] * P[1, j]
    return ll, filtered
