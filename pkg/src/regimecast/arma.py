"""Exact Gaussian ARMA(p,q) estimation, residual filtering, and iterative
multi-step forecasting.

Estimation maximizes the exact state-space likelihood (stationary
initialization, prediction-error decomposition), optionally with
per-observation weights multiplying each likelihood contribution.  The
optimizer works on an unconstrained parameterization: the long-run mean
directly, AR and MA coefficients through partial autocorrelations (tanh
transform + Durbin-Levinson), with the innovation variance concentrated out
analytically.  Quasi-Newton with seeded random restarts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from ._filters import arma_filter, arma_weighted_loglik
from .months import MonthDate

__all__ = [
    "ArmaSpec",
    "ArmaParams",
    "ForecastPath",
    "NonConvergence",
    "DegenerateSample",
    "fit_mle",
    "filter_residuals",
    "forecast_iterative",
    "simulate",
]

# relative log-likelihood improvement tolerance and iteration cap per start
_REL_LL_TOL = 1e-9
_MAX_ITER = 500
_PACF_CLIP = 1.0 - 1e-12


class NonConvergence(RuntimeError):
    """No optimizer start converged; message carries the best point found."""


class DegenerateSample(ValueError):
    """Sample has no variation; the Gaussian likelihood is unbounded."""


@dataclass(frozen=True)
class ArmaSpec:
    """Model order (p autoregressive lags, q moving-average lags)."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0 or self.p + self.q + 1 < 1:
            raise ValueError("orders must be non-negative")

    @property
    def n_coeffs(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class ArmaParams:
    """Intercept, AR coefficients, MA coefficients, innovation variance."""

    alpha: float
    phi: tuple = ()
    theta: tuple = ()
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi",
                           tuple(float(c) for c in np.atleast_1d(np.asarray(self.phi))))
        object.__setattr__(self, "theta",
                           tuple(float(c) for c in np.atleast_1d(np.asarray(self.theta))))
        if self.sigma2 <= 0.0:
            raise ValueError("sigma2 must be positive")

    @property
    def mean(self) -> float:
        """Unconditional mean alpha / (1 - sum of AR coefficients)."""
        s = sum(self.phi)
        if abs(1.0 - s) < 1e-12:
            raise ValueError("AR coefficients sum to 1; mean undefined")
        return self.alpha / (1.0 - s)

    @property
    def spec(self) -> ArmaSpec:
        return ArmaSpec(len(self.phi), len(self.theta))


@dataclass(frozen=True)
class ForecastPath:
    """Horizon-indexed forecast values from a fixed origin, h = 1..H."""

    origin: Optional[MonthDate]
    horizon: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.horizon,):
            raise ValueError("values length must equal horizon")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite forecast value")

    @property
    def average(self) -> float:
        return float(np.mean(self.values))

    def shifted(self, errors: np.ndarray) -> "ForecastPath":
        return ForecastPath(self.origin, self.horizon,
                            self.values + np.asarray(errors, dtype=float))


# --------------------------------------------------------------------------
# unconstrained <-> constrained parameter maps
# --------------------------------------------------------------------------

def _pacf_to_ar(pacf: np.ndarray) -> np.ndarray:
    """Durbin-Levinson: partial autocorrelations -> stationary AR coefficients."""
    a = np.zeros(0)
    for k, r in enumerate(pacf):
        new = np.empty(k + 1)
        new[k] = r
        for j in range(k):
            new[j] = a[j] - r * a[k - 1 - j]
        a = new
    return a


def _unpack(u: np.ndarray, spec: ArmaSpec) -> tuple[float, np.ndarray, np.ndarray]:
    """(mu, pacf_ar..., pacf_ma...) -> (mu, phi, theta)."""
    mu = u[0]
    r_ar = np.clip(np.tanh(u[1:1 + spec.p]), -_PACF_CLIP, _PACF_CLIP)
    r_ma = np.clip(np.tanh(u[1 + spec.p:1 + spec.p + spec.q]), -_PACF_CLIP, _PACF_CLIP)
    phi = _pacf_to_ar(r_ar)
    # invertibility of 1 + theta_1 L + ... is stationarity of the flipped-sign
    # AR polynomial, so reuse the same map and negate
    theta = -_pacf_to_ar(r_ma)
    return float(mu), phi, theta


def _series_values(y) -> np.ndarray:
    vals = getattr(y, "values", y)
    return np.ascontiguousarray(np.asarray(vals, dtype=float))


# --------------------------------------------------------------------------
# estimation
# --------------------------------------------------------------------------

def fit_mle(y, spec: ArmaSpec, weights=None, n_restarts: int = 8,
            seed: int = 0) -> ArmaParams:
    """Exact (optionally kernel-weighted) Gaussian MLE of an ARMA(p,q).

    Parameters
    ----------
    y : InflationSeries or 1-d array of observations.
    spec : model order.
    weights : optional KernelWeights or 1-d array of per-observation weights
        multiplying each log-likelihood contribution (Gaussian-kernel
        similarity weighting); length must match y.
    n_restarts : quasi-Newton starts (1 deterministic + n-1 seeded draws).
    seed : seed for the restart perturbations; fits are fully deterministic.
    """
    yv = _series_values(y)
    n = yv.size
    if n <= 10 * (spec.p + spec.q + 1):
        raise ValueError(f"sample of {n} too short for ARMA({spec.p},{spec.q})")
    if np.ptp(yv) == 0.0:
        raise DegenerateSample("constant series")

    if weights is None:
        w = np.ones(n)
    else:
        w = _series_values(getattr(weights, "weights", weights))
        if w.size != n:
            raise ValueError("weights length does not match series length")
        if np.any(w < 0.0):
            raise ValueError("negative weight")
    wsum = float(w.sum())
    if wsum <= 0.0:
        raise ValueError("weights sum to zero")

    def neg_avg_loglik(u: np.ndarray) -> float:
        mu, phi, theta = _unpack(u, spec)
        try:
            ll, _, ok = arma_weighted_loglik(yv - mu, phi, theta, w)
        except np.linalg.LinAlgError:
            # stationary-covariance solve can degenerate at near-unit-root
            # corners the optimizer probes; treat as an infeasible point
            return 1e12
        if not ok:
            return 1e12
        return -ll / wsum

    dim = 1 + spec.p + spec.q
    w_mean = float(np.dot(w, yv) / wsum)
    w_sd = float(np.sqrt(max(np.dot(w, (yv - w_mean) ** 2) / wsum, 1e-12)))

    starts = [np.zeros(dim)]
    starts[0][0] = w_mean
    rng = np.random.default_rng(seed)
    for _ in range(max(n_restarts - 1, 0)):
        u = np.zeros(dim)
        u[0] = w_mean + rng.normal(0.0, 0.5) * w_sd
        u[1:] = rng.normal(0.0, 0.8, size=dim - 1)
        starts.append(u)

    best = None
    any_success = False
    for u0 in starts:
        res = minimize(neg_avg_loglik, u0, method="L-BFGS-B",
                       options={"ftol": _REL_LL_TOL, "gtol": 1e-8,
                                "maxiter": _MAX_ITER})
        any_success = any_success or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    if not any_success and not np.isfinite(best.fun):
        raise NonConvergence(
            f"no start converged; best point {best.x}, "
            f"|grad| {np.linalg.norm(best.jac):.3g}")

    mu, phi, theta = _unpack(best.x, spec)
    _, sigma2, ok = arma_weighted_loglik(yv - mu, phi, theta, w)
    if not ok:
        raise NonConvergence(f"degenerate likelihood at optimum {best.x}")
    alpha = mu * (1.0 - phi.sum())
    return ArmaParams(alpha=float(alpha), phi=tuple(phi), theta=tuple(theta),
                      sigma2=float(sigma2))


def loglikelihood(y, params: ArmaParams, weights=None) -> float:
    """Weighted exact log-likelihood of `y` at fixed parameters."""
    yv = _series_values(y)
    w = np.ones(yv.size) if weights is None \
        else _series_values(getattr(weights, "weights", weights))
    v, f, ok = arma_filter(yv - params.mean, np.asarray(params.phi),
                           np.asarray(params.theta))
    if not ok:
        return -np.inf
    s2 = params.sigma2
    ll_t = -0.5 * (np.log(2.0 * np.pi * s2 * f) + v * v / (s2 * f))
    return float(np.dot(w, ll_t))


def filter_residuals(y, params: ArmaParams) -> np.ndarray:
    """One-step-ahead innovations from the stationary-initialized filter.

    The last element is the eps_T that feeds the h = 1 forecast.  Early
    elements are burn-in prediction errors, per the filter's stationary
    initialization — no presample padding.
    """
    yv = _series_values(y)
    v, _, ok = arma_filter(yv - params.mean, np.asarray(params.phi, dtype=float),
                           np.asarray(params.theta, dtype=float))
    if not ok:
        raise FloatingPointError("filter degenerated; parameters near boundary?")
    return v


# --------------------------------------------------------------------------
# forecasting / simulation
# --------------------------------------------------------------------------

def forecast_iterative(params: ArmaParams,
                       y_T: Union[float, Sequence[float]],
                       eps_T: Union[float, Sequence[float]],
                       H: int,
                       origin: Optional[MonthDate] = None) -> ForecastPath:
    """Iterative multi-horizon point forecast.

    h = 1 uses the full recursion (AR lags plus MA innovations); h >= 2 is
    purely autoregressive with unknown future innovations at zero.  For
    p > 1 / q > 1 pass the last p observations / q innovations ordered
    oldest to newest; scalars are fine for first-order models.
    """
    if H < 1:
        raise ValueError("horizon must be >= 1")
    p, q = len(params.phi), len(params.theta)
    y_hist = list(np.atleast_1d(np.asarray(y_T, dtype=float)))
    e_hist = list(np.atleast_1d(np.asarray(eps_T, dtype=float)))
    if len(y_hist) < p:
        raise ValueError(f"need the last {p} observations, got {len(y_hist)}")
    if len(e_hist) < q:
        raise ValueError(f"need the last {q} innovations, got {len(e_hist)}")

    path = np.empty(H)
    for h in range(1, H + 1):
        val = params.alpha
        for i, c in enumerate(params.phi, start=1):
            val += c * y_hist[-i]
        if h == 1:
            for j, c in enumerate(params.theta, start=1):
                val += c * e_hist[-j]
        path[h - 1] = val
        y_hist.append(val)
    return ForecastPath(origin=origin, horizon=H, values=path)


def simulate(params: ArmaParams, n: int, rng: np.random.Generator,
             y_init: Optional[Sequence[float]] = None,
             eps_init: Optional[Sequence[float]] = None) -> tuple[np.ndarray, np.ndarray]:
    """Draw n observations from the ARMA recursion.

    Lags default to the unconditional mean (innovation lags to zero), so pass
    explicit `y_init`/`eps_init` to continue an existing trajectory.  Returns
    (y, eps) so a caller can chain segments.
    """
    p, q = len(params.phi), len(params.theta)
    y_lags = list(y_init) if y_init is not None else [params.mean] * max(p, 1)
    e_lags = list(eps_init) if eps_init is not None else [0.0] * max(q, 1)
    sd = float(np.sqrt(params.sigma2))
    y = np.empty(n)
    eps = rng.normal(0.0, sd, size=n)
    for t in range(n):
        val = params.alpha + eps[t]
        for i, c in enumerate(params.phi, start=1):
            val += c * y_lags[-i]
        for j, c in enumerate(params.theta, start=1):
            val += c * e_lags[-j]
        y[t] = val
        y_lags.append(val)
        e_lags.append(eps[t])
    return y, eps
