"""Adaptive benchmark models: Markov-switching AR(1) and a break-activated
time-varying-parameter AR(4).

The switching model is estimated by direct quasi-Newton maximization of the
Hamilton-filter likelihood (all three of intercept, AR coefficient, and
innovation variance switch); the TVP model runs a Kalman filter over random
walk coefficients whose innovation covariance turns on at a chosen break
date.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from ._filters import hamilton_filter
from .arma import ForecastPath, NonConvergence
from .data import MonthlySeries, slice_series
from .months import MonthDate

__all__ = [
    "MsArParams",
    "TvpState",
    "LabelDegeneracy",
    "fit_msar",
    "forecast_msar",
    "tvp_filter",
    "fit_forecast_tvp",
    "tvp_one_step_recursive",
]

_MSAR_MIN_OBS = 200


class LabelDegeneracy(RuntimeError):
    """The two regimes collapsed to identical parameters."""


@dataclass(frozen=True)
class MsArParams:
    """Two-regime switching AR(1); regime 1 is the low-mean state."""

    alpha: tuple
    rho: tuple
    sigma: tuple
    P: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "rho", tuple(float(r) for r in self.rho))
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))
        P = np.asarray(self.P, dtype=float)
        object.__setattr__(self, "P", P)
        if P.shape != (2, 2) or np.any(P < -1e-12) or np.any(P > 1.0 + 1e-12):
            raise ValueError("P must be 2x2 with entries in [0,1]")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("P rows must sum to 1")
        if any(s <= 0.0 for s in self.sigma):
            raise ValueError("sigma components must be positive")
        if any(abs(r) >= 1.0 for r in self.rho):
            raise ValueError("each regime must be stationary")
        if self.regime_means[0] > self.regime_means[1] + 1e-9:
            raise ValueError("regime 1 must have the lower unconditional mean")

    @property
    def regime_means(self) -> tuple:
        return tuple(a / (1.0 - r) for a, r in zip(self.alpha, self.rho))

    @property
    def ergodic(self) -> np.ndarray:
        """Stationary distribution of the chain."""
        stay = 2.0 - self.P[0, 0] - self.P[1, 1]
        if stay <= 1e-12:
            return np.array([0.5, 0.5])
        return np.array([(1.0 - self.P[1, 1]) / stay,
                         (1.0 - self.P[0, 0]) / stay])


def _unpack_msar(u: np.ndarray):
    alpha = np.array([u[0], u[1]])
    rho = np.tanh(np.array([u[2], u[3]]))
    sigma2 = np.exp(np.array([u[4], u[5]]))
    p11 = 1.0 / (1.0 + np.exp(-u[6]))
    p22 = 1.0 / (1.0 + np.exp(-u[7]))
    P = np.array([[p11, 1.0 - p11], [1.0 - p22, p22]])
    return alpha, rho, sigma2, P


def _ergodic(P: np.ndarray) -> np.ndarray:
    stay = 2.0 - P[0, 0] - P[1, 1]
    if stay <= 1e-12:
        return np.array([0.5, 0.5])
    return np.array([(1.0 - P[1, 1]) / stay, (1.0 - P[0, 0]) / stay])


def fit_msar(y, n_restarts: int = 16, seed: int = 0) -> Tuple[MsArParams, np.ndarray]:
    """Maximize the Hamilton-filter likelihood of a two-regime switching AR(1).

    Returns the parameters (low-mean regime first) and the filtered
    probability of the HIGH regime at each observation; the first element is
    the ergodic probability, since y[0] only conditions the first
    autoregression.
    """
    yv = np.ascontiguousarray(np.asarray(getattr(y, "values", y), dtype=float))
    n = yv.size
    if n < _MSAR_MIN_OBS:
        raise ValueError(f"need at least {_MSAR_MIN_OBS} observations, got {n}")

    def neg_ll(u: np.ndarray) -> float:
        alpha, rho, sigma2, P = _unpack_msar(u)
        ll, _ = hamilton_filter(yv, alpha, rho, sigma2, P, _ergodic(P))
        return 1e12 if not np.isfinite(ll) else -ll / n

    med = float(np.median(yv))
    lo = float(np.mean(yv[yv <= med]))
    hi = float(np.mean(yv[yv > med]))
    v = float(np.var(yv))
    base = np.array([0.5 * lo, 0.5 * hi, np.arctanh(0.5), np.arctanh(0.5),
                     np.log(max(v / 2.0, 1e-4)), np.log(max(v / 2.0, 1e-4)),
                     2.197, 2.197])  # p11 = p22 = 0.9
    rng = np.random.default_rng(seed)
    starts = [base]
    scale = np.array([abs(lo) + 1.0, abs(hi) + 1.0, 0.6, 0.6, 0.8, 0.8, 1.0, 1.0])
    for _ in range(max(n_restarts - 1, 0)):
        starts.append(base + rng.normal(0.0, 1.0, size=8) * scale)

    best = None
    for u0 in starts:
        res = minimize(neg_ll, u0, method="L-BFGS-B",
                       options={"ftol": 1e-10, "maxiter": 800})
        if best is None or res.fun < best.fun:
            best = res
    if not np.isfinite(best.fun) or best.fun >= 1e11:
        raise NonConvergence("no start produced a finite switching likelihood")

    alpha, rho, sigma2, P = _unpack_msar(best.x)
    means = alpha / (1.0 - rho)
    order = np.argsort(means)
    alpha, rho, sigma2 = alpha[order], rho[order], sigma2[order]
    P = P[np.ix_(order, order)]

    sep = (abs(alpha[0] - alpha[1]) + abs(rho[0] - rho[1])
           + abs(np.sqrt(sigma2[0]) - np.sqrt(sigma2[1])))
    if sep < 1e-3 * (1.0 + float(np.max(np.abs(alpha)))):
        raise LabelDegeneracy(
            f"regimes collapsed: alpha={alpha}, rho={rho}, sigma2={sigma2}")

    params = MsArParams(alpha=tuple(alpha), rho=tuple(rho),
                        sigma=tuple(np.sqrt(sigma2)), P=P)
    xi0 = _ergodic(P)
    _, filt = hamilton_filter(yv, alpha, rho, sigma2, P, xi0.copy())
    probs = np.empty(n)
    probs[0] = xi0[1]
    probs[1:] = filt[:, 1]
    return params, probs


def forecast_msar(params: MsArParams, filtered_T, y_T: float,
                  H: int, origin: Optional[MonthDate] = None) -> ForecastPath:
    """Propagate (regime probability, regime-conditional mean) jointly.

    The origin's filtered regime governs the first forecast month; the chain
    transitions between forecast steps.  Because the conditional mean given
    a regime path is linear in the previous path mean, carrying
    E[y | current regime] through the chain is exact for every horizon, not
    just an approximation.

    `filtered_T` is either the probability pair (low, high) or the single
    high-regime probability, the form `fit_msar` returns per observation.
    """
    if H < 1:
        raise ValueError("horizon must be >= 1")
    pi = np.atleast_1d(np.asarray(filtered_T, dtype=float))
    if pi.shape == (1,):
        pi = np.array([1.0 - pi[0], pi[0]])
    if pi.shape != (2,) or abs(float(pi.sum()) - 1.0) > 1e-9 \
            or np.any(pi < -1e-12):
        raise ValueError("filtered_T must be a probability pair")
    alpha = np.asarray(params.alpha)
    rho = np.asarray(params.rho)
    m = np.array([float(y_T), float(y_T)])
    values = np.empty(H)
    for h in range(H):
        if h > 0:
            joint = pi[:, None] * params.P      # joint[i, j]
            pi_next = joint.sum(axis=0)
            incoming = np.empty(2)
            for j in range(2):
                if pi_next[j] <= 0.0:
                    incoming[j] = m[j]          # unreachable regime, weight 0
                else:
                    incoming[j] = float(joint[:, j] @ m) / pi_next[j]
            pi = pi_next
        else:
            incoming = m
        m = alpha + rho * incoming
        values[h] = float(pi @ m)
    return ForecastPath(origin=origin, horizon=H, values=values)


# --------------------------------------------------------------------------
# TVP-AR(4)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TvpState:
    """End-of-sample coefficient state of the TVP-AR(4) filter."""

    beta: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)
    q_schedule: Dict[MonthDate, np.ndarray] = field(repr=False, default=None)
    meas_var: float = 1.0

    def __post_init__(self) -> None:
        beta = np.asarray(self.beta, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "cov", cov)
        if beta.shape != (5,) or cov.shape != (5, 5):
            raise ValueError("expected a 5-dim coefficient state")
        if np.max(np.abs(cov - cov.T)) > 1e-8:
            raise ValueError("cov must be symmetric")
        if self.meas_var <= 0.0:
            raise ValueError("meas_var must be positive")


def _ar4_design(yv: np.ndarray):
    """Regression rows x_t = (1, y_{t-1}, ..., y_{t-4}) and targets y_t."""
    n = yv.size
    x = np.empty((n - 4, 5))
    x[:, 0] = 1.0
    for lag in range(1, 5):
        x[:, lag] = yv[4 - lag:n - lag]
    return x, yv[4:]


def tvp_filter(y: MonthlySeries, break_date: MonthDate, q_scale: float,
               init_end: Optional[MonthDate] = None,
               extra_values: Optional[np.ndarray] = None):
    """Kalman filter over random-walk AR(4) coefficients.

    Q_t = q_scale * I_5 from `break_date` onward and zero before; the state
    is initialized at OLS estimates over the first ~30 years (covariance
    inflated x4) and the measurement variance is the pre-break OLS residual
    variance.  `extra_values` appends realized out-of-sample months so the
    recursive variant can keep updating.

    Returns (TvpState, one_step_predictions, min_eigenvalue_seen) where the
    predictions are x_t' beta_{t|t-1} for every filtered row.
    """
    if q_scale < 0.0:
        raise ValueError("q_scale must be non-negative")
    yv = np.asarray(y.values, dtype=float)
    if extra_values is not None:
        yv = np.concatenate([yv, np.asarray(extra_values, dtype=float)])
    if yv.size < 40:
        raise ValueError("too few observations for an AR(4) filter")
    x, target = _ar4_design(yv)
    dates = [y.start.plus(4 + k) for k in range(target.size)]

    if init_end is None:
        init_end = min(y.end, y.start.plus(370))
    init_rows = sum(1 for d in dates if d <= init_end)
    if init_rows < 20:
        raise ValueError("initialization window has too few rows")
    xi, ti = x[:init_rows], target[:init_rows]
    beta0, *_ = np.linalg.lstsq(xi, ti, rcond=None)
    resid0 = ti - xi @ beta0
    dof = max(init_rows - 5, 1)
    s2_init = float(resid0 @ resid0) / dof
    cov0 = 4.0 * s2_init * np.linalg.inv(xi.T @ xi)

    pre_rows = [k for k, d in enumerate(dates) if d < break_date]
    if len(pre_rows) < 10:
        raise ValueError("break date leaves too little pre-break data")
    xp, tp = x[pre_rows], target[pre_rows]
    bp, *_ = np.linalg.lstsq(xp, tp, rcond=None)
    rp = tp - xp @ bp
    meas_var = float(rp @ rp) / max(len(pre_rows) - 5, 1)

    q_on = q_scale * np.eye(5)
    beta = beta0.copy()
    cov = 0.5 * (cov0 + cov0.T)
    min_eig = np.inf
    preds = np.empty(target.size)
    for k in range(target.size):
        if dates[k] >= break_date and q_scale > 0.0:
            cov = cov + q_on
        xk = x[k]
        preds[k] = float(xk @ beta)
        s = float(xk @ cov @ xk) + meas_var
        gain = (cov @ xk) / s
        beta = beta + gain * (target[k] - preds[k])
        cov = cov - np.outer(gain, xk @ cov)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(cov).min()))
        cov = 0.5 * (cov + cov.T)

    schedule = {break_date: q_on}
    state = TvpState(beta=beta, cov=cov, q_schedule=schedule, meas_var=meas_var)
    return state, preds, min_eig


def fit_forecast_tvp(y: MonthlySeries, break_date: MonthDate, q_scale: float,
                     H: int, init_end: Optional[MonthDate] = None) -> ForecastPath:
    """Filter to the end of `y`, then iterate the AR(4) with frozen beta_T."""
    if H < 1:
        raise ValueError("horizon must be >= 1")
    state, _, _ = tvp_filter(y, break_date, q_scale, init_end=init_end)
    lags = list(np.asarray(y.values, dtype=float)[-4:])  # oldest to newest
    values = np.empty(H)
    for h in range(H):
        xk = np.array([1.0, lags[-1], lags[-2], lags[-3], lags[-4]])
        values[h] = float(xk @ state.beta)
        lags.append(values[h])
    return ForecastPath(origin=y.end, horizon=H, values=values)


def tvp_one_step_recursive(y: MonthlySeries, realized: MonthlySeries,
                           break_date: MonthDate, q_scale: float,
                           init_end: Optional[MonthDate] = None) -> ForecastPath:
    """One-step forecasts that keep updating through the realized months.

    `realized` must start the month after `y` ends; the returned path holds
    the Kalman one-step predictions for exactly those months.
    """
    if realized.start != y.end.plus(1):
        raise ValueError("realized block must continue the sample")
    _, preds, _ = tvp_filter(y, break_date, q_scale, init_end=init_end,
                             extra_values=realized.values)
    h = len(realized)
    return ForecastPath(origin=y.end, horizon=h, values=preds[-h:])
