"""Historically informed forecast adjustments.

Three ways to let a past inflationary episode inform a current forecast:
shift the path by one reference episode's out-of-sample errors (intercept
correction), shift it by errors averaged across every origin in a reference
window under fixed pre-shock parameters (robust variant), or re-estimate the
model on the analogous subsample outright and forecast from current initial
conditions (similarity).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .arma import ArmaParams, ArmaSpec, ForecastPath, filter_residuals, fit_mle, forecast_iterative
from .data import InflationSeries, MonthlySeries, slice_series
from .months import MonthDate

__all__ = [
    "CorrectionVector",
    "InsufficientHistory",
    "correction_vector",
    "intercept_correction",
    "robust_intercept_correction",
    "similarity_forecast",
]


class InsufficientHistory(ValueError):
    """Not enough observations around the requested origin(s)."""


@dataclass(frozen=True)
class CorrectionVector:
    """Out-of-sample forecast errors from a reference origin, h = 1..H."""

    horizon: int
    errors: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        e = np.asarray(self.errors, dtype=float)
        object.__setattr__(self, "errors", e)
        if e.shape != (self.horizon,):
            raise ValueError("errors length must equal horizon")
        if not np.all(np.isfinite(e)):
            raise ValueError("non-finite correction")


def _origin_state(y: MonthlySeries, origin: MonthDate, params: ArmaParams):
    """Last p observations and last q filtered innovations at the origin."""
    p, q = len(params.phi), len(params.theta)
    sub = slice_series(y, y.start, origin)
    if len(sub) < max(p, 1) + 1:
        raise InsufficientHistory(f"too little history before {origin}")
    y_lags = sub.values[-p:] if p > 0 else np.zeros(1)
    if q > 0:
        eps_lags = filter_residuals(sub, params)[-q:]
    else:
        eps_lags = np.zeros(1)
    return y_lags, eps_lags


def fixed_param_forecast(y: MonthlySeries, origin: MonthDate,
                         params: ArmaParams, H: int) -> ForecastPath:
    """Iterative H-step forecast from `origin` holding `params` fixed."""
    y_lags, eps_lags = _origin_state(y, origin, params)
    return forecast_iterative(params, y_lags, eps_lags, H, origin=origin)


def correction_vector(y: InflationSeries, ref_origin: MonthDate,
                      spec: ArmaSpec, H: int,
                      params: Optional[ArmaParams] = None) -> CorrectionVector:
    """Realized-minus-forecast errors over the H months after `ref_origin`.

    When `params` is omitted the model is re-fit on data up to the origin
    (the single-episode convention); pass fixed pre-shock parameters for the
    robust convention.
    """
    if ref_origin < y.start or y.end < ref_origin.plus(H):
        raise InsufficientHistory(
            f"reference window {ref_origin}+{H} months leaves {y.start}..{y.end}")
    if params is None:
        params = fit_mle(slice_series(y, y.start, ref_origin), spec)
    path = fixed_param_forecast(y, ref_origin, params, H)
    realized = np.array([y.at(ref_origin.plus(h)) for h in range(1, H + 1)])
    return CorrectionVector(H, realized - path.values)


def intercept_correction(base: ForecastPath, y: InflationSeries,
                         ref_origin: MonthDate, spec: ArmaSpec,
                         params: Optional[ArmaParams] = None) -> ForecastPath:
    """Shift `base` by one reference episode's out-of-sample errors."""
    cv = correction_vector(y, ref_origin, spec, base.horizon, params=params)
    return base.shifted(cv.errors)


def robust_intercept_correction(base: ForecastPath, y: InflationSeries,
                                window: tuple, pre_sample_end: MonthDate,
                                spec: ArmaSpec) -> ForecastPath:
    """Shift `base` by errors averaged over every origin in `window`.

    The model is fit once on data up to `pre_sample_end` and held fixed;
    origins lacking all H realized months are excluded, keeping each
    horizon's average over the same origin set.
    """
    start, end = window
    if not pre_sample_end < start:
        raise InsufficientHistory("pre-shock sample must end before the window")
    params = fit_mle(slice_series(y, y.start, pre_sample_end), spec)

    H = base.horizon
    total = np.zeros(H)
    n_origins = 0
    origin = start
    while origin <= end:
        if y.end >= origin.plus(H):
            cv = correction_vector(y, origin, spec, H, params=params)
            total += cv.errors
            n_origins += 1
        origin = origin.plus(1)
    if n_origins == 0:
        raise InsufficientHistory("no origin in the window has H realized months")
    return base.shifted(total / n_origins)


def similarity_forecast(y: InflationSeries, window: tuple, spec: ArmaSpec,
                        origin_y: Union[float, Sequence[float]],
                        H: int) -> ForecastPath:
    """Re-estimate on the analogous window, forecast from current conditions.

    The innovation feeding the h = 1 term comes from filtering the full
    history `y` through the subsample parameters, so the initial condition
    reflects today's surprises priced with the window's dynamics.
    """
    params = fit_mle(slice_series(y, window[0], window[1]), spec)
    q = len(params.theta)
    eps_lags = filter_residuals(y, params)[-q:] if q > 0 else 0.0
    return forecast_iterative(params, origin_y, eps_lags, H, origin=y.end)
