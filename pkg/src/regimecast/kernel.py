"""Kernel-weighted ARMA estimation driven by an oil-price state variable.

Observations get Gaussian-kernel weights by how close their state value sits
to the state at the forecast origin; the weighted likelihood then tilts the
parameter estimates toward historically similar months.  Bandwidth comes
from weighted pseudo-out-of-sample cross-validation under an effective
sample-size floor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arma import ArmaSpec, ForecastPath, filter_residuals, fit_mle, forecast_iterative
from .data import MonthlySeries, annualized_log_diff
from .months import MonthDate

__all__ = [
    "KernelWeights",
    "StateSeries",
    "ZeroMass",
    "NoFeasibleBandwidth",
    "oil_growth_state",
    "gaussian_weights",
    "effective_sample_size",
    "cv_score",
    "default_bandwidth_grid",
    "select_bandwidth",
    "kernel_forecast",
]

ESS_FLOOR_DEFAULT = 30.0


class ZeroMass(ArithmeticError):
    """Every raw kernel value underflowed; the bandwidth is too small."""


class NoFeasibleBandwidth(ValueError):
    """No grid point satisfies the effective-sample-size floor."""


class StateSeries(MonthlySeries):
    """State variable (annualized percent growth) aligned month-by-month
    with the inflation series it weights."""


def oil_growth_state(levels: MonthlySeries) -> StateSeries:
    """Annualized log growth of a price level series, as a StateSeries."""
    g = annualized_log_diff(levels)
    return StateSeries(g.start, g.values, name=g.name)


@dataclass(frozen=True)
class KernelWeights:
    """Normalized Gaussian-kernel observation weights around a state origin."""

    weights: np.ndarray = field(repr=False)
    bandwidth: float = 1.0
    state_origin: float = 0.0
    ess: float = 1.0

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if np.any(w < 0.0):
            raise ValueError("negative weight")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to one")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")

    def __len__(self) -> int:
        return self.weights.size


def effective_sample_size(weights: np.ndarray) -> float:
    """1 / sum of squared normalized weights."""
    w = np.asarray(weights, dtype=float)
    return float(1.0 / np.dot(w, w))


def _state_values(z) -> np.ndarray:
    return np.asarray(getattr(z, "values", z), dtype=float)


def gaussian_weights(z, z_T: float, b: float) -> KernelWeights:
    """w_t proportional to exp(-((z_t - z_T)/b)^2 / 2), normalized to sum 1."""
    if b <= 0.0:
        raise ValueError("bandwidth must be positive")
    zv = _state_values(z)
    if zv.size == 0:
        raise ValueError("empty state series")
    u = (zv - z_T) / b
    raw = np.exp(-0.5 * u * u)
    mass = float(raw.sum())
    if mass == 0.0:
        raise ZeroMass(f"all kernel values underflow at b={b}")
    w = raw / mass
    return KernelWeights(weights=w, bandwidth=float(b), state_origin=float(z_T),
                         ess=effective_sample_size(w))


def default_bandwidth_grid(z, n_points: int = 60) -> np.ndarray:
    """Log-spaced candidates spanning 0.05 to 50 standard deviations of z."""
    sd = float(np.std(_state_values(z)))
    if sd <= 0.0:
        raise ValueError("state series has no variation")
    return np.geomspace(0.05 * sd, 50.0 * sd, n_points)


def cv_score(y, z, z_T: float, b: float, spec: ArmaSpec,
             eval_fraction: float = 0.2, refit_every: int = 12,
             n_restarts: int = 2, seed: int = 0) -> float:
    """Weighted pseudo-out-of-sample squared-error criterion for one bandwidth.

    Expanding-window one-step forecasts over the last `eval_fraction` of the
    sample, with the weighted model refit every `refit_every` observations on
    the data (and kernel weights) available at that point; each squared error
    is multiplied by its date's kernel weight before summing.
    """
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    zv = _state_values(z)
    if yv.size != zv.size:
        raise ValueError("state series must align with the target series")
    n = yv.size
    n_eval = max(1, int(n * eval_fraction))
    t0 = n - n_eval
    w_full = gaussian_weights(zv, z_T, b).weights

    score = 0.0
    params = None
    for t in range(t0, n):
        if params is None or (t - t0) % refit_every == 0:
            try:
                w_train = gaussian_weights(zv[:t], z_T, b)
            except ZeroMass:
                return np.inf
            params = fit_mle(yv[:t], spec, weights=w_train.weights,
                             n_restarts=n_restarts, seed=seed)
        p, q = spec.p, spec.q
        y_lags = yv[t - max(p, 1):t]
        eps = filter_residuals(yv[:t], params)[-q:] if q > 0 else 0.0
        fc = forecast_iterative(params, y_lags, eps, 1)
        err = yv[t] - fc.values[0]
        score += w_full[t] * err * err
    return float(score)


def select_bandwidth(y, z, z_T: float, grid, ess_floor: float, spec: ArmaSpec,
                     eval_fraction: float = 0.2, refit_every: int = 12,
                     n_restarts: int = 2, seed: int = 0) -> float:
    """Weighted-CV bandwidth choice; ties broken toward the larger candidate."""
    candidates = np.sort(np.asarray(grid, dtype=float))
    if candidates.size == 0 or np.any(candidates <= 0.0):
        raise ValueError("grid must be non-empty and positive")
    if ess_floor < 1.0:
        raise ValueError("ess_floor must be at least 1")

    best_b: Optional[float] = None
    best_score = np.inf
    for b in candidates:
        try:
            kw = gaussian_weights(z, z_T, b)
        except ZeroMass:
            continue
        if kw.ess < ess_floor:
            continue
        s = cv_score(y, z, z_T, b, spec, eval_fraction=eval_fraction,
                     refit_every=refit_every, n_restarts=n_restarts, seed=seed)
        if s <= best_score:  # ascending grid, so <= prefers the larger b
            best_score = s
            best_b = float(b)
    if best_b is None:
        raise NoFeasibleBandwidth(
            f"no candidate reaches effective sample size {ess_floor}")
    return best_b


def kernel_forecast(y, z, b: float, origin_y, H: int, spec: ArmaSpec,
                    origin: Optional[MonthDate] = None) -> ForecastPath:
    """Weighted fit at bandwidth b, innovations from the full history, then
    an iterative forecast from the supplied origin condition.

    The state origin z_T is the last state value, i.e. the forecast origin's
    own month.
    """
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    zv = _state_values(z)
    if yv.size != zv.size:
        raise ValueError("state series must align with the target series")
    kw = gaussian_weights(zv, float(zv[-1]), b)
    params = fit_mle(yv, spec, weights=kw.weights)
    q = spec.q
    eps = filter_residuals(yv, params)[-q:] if q > 0 else 0.0
    if origin is None and hasattr(y, "end"):
        origin = y.end
    return forecast_iterative(params, origin_y, eps, H, origin=origin)
