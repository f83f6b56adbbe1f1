import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import arma_autocovariances, gaussian_innovations
from regimecast._filters import arma_filter, arma_weighted_loglik
from regimecast.arma import (
    ArmaParams,
    ArmaSpec,
    DegenerateSample,
    ForecastPath,
    filter_residuals,
    fit_mle,
    forecast_iterative,
    loglikelihood,
    simulate,
)

# --------------------------------------------------------------------------
# filter correctness against the covariance-conditioning oracle
# --------------------------------------------------------------------------

# Frozen from tests/oracles.py: ARMA(1,1) with mean 1, phi=0.6, theta=0.3,
# sigma2=1.5 on y=(1.8, 0.6, 2.1).  Innovations v, variances F, log-likelihood.
_ORACLE_Y = np.array([1.8, 0.6, 2.1])
_ORACLE_PARAMS = ArmaParams(alpha=0.4, phi=(0.6,), theta=(0.3,), sigma2=1.5)
_ORACLE_V = np.array([0.8, -0.9859310344827587, 1.6216205922910236])
_ORACLE_F = np.array([3.398437499999999, 1.575413793103448, 1.5064623415851335])
_ORACLE_LL = -5.076075782849075


def test_three_step_kalman_matches_brute_force_oracle():
    v = filter_residuals(_ORACLE_Y, _ORACLE_PARAMS)
    assert np.max(np.abs(v - _ORACLE_V)) < 1e-10

    _, f, ok = arma_filter(_ORACLE_Y - 1.0, np.array([0.6]), np.array([0.3]))
    assert ok
    assert np.max(np.abs(1.5 * f - _ORACLE_F)) < 1e-10

    assert abs(loglikelihood(_ORACLE_Y, _ORACLE_PARAMS) - _ORACLE_LL) < 1e-10


def test_oracle_literals_still_reproduce():
    # guards the frozen numbers above against drift in the oracle itself
    gamma = arma_autocovariances([0.6], [0.3], 1.5, 2)
    v, f, ll = gaussian_innovations(_ORACLE_Y, 1.0, gamma)
    assert np.max(np.abs(v - _ORACLE_V)) < 1e-12
    assert np.max(np.abs(f - _ORACLE_F)) < 1e-12
    assert abs(ll - _ORACLE_LL) < 1e-12


def test_kalman_matches_oracle_on_longer_ar2_sample():
    params = ArmaParams(alpha=0.5, phi=(0.5, -0.2), theta=(0.4,), sigma2=2.0)
    rng = np.random.default_rng(5)
    y, _ = simulate(params, 40, rng)
    gamma = arma_autocovariances(params.phi, params.theta, params.sigma2, y.size)
    v, _, ll = gaussian_innovations(y, params.mean, gamma)
    assert np.max(np.abs(filter_residuals(y, params) - v)) < 1e-8
    assert abs(loglikelihood(y, params) - ll) < 1e-8


def test_white_noise_residuals_are_the_series():
    y = np.array([0.3, -1.2, 4.5, 0.0])
    params = ArmaParams(alpha=0.0, phi=(), theta=(), sigma2=1.0)
    assert np.array_equal(filter_residuals(y, params), y)


def test_ar1_residual_hand_arithmetic():
    params = ArmaParams(alpha=0.0, phi=(0.5,), theta=(), sigma2=1.0)
    v = filter_residuals(np.array([2.0, 3.0]), params)
    assert v[0] == pytest.approx(2.0, abs=1e-12)
    assert v[1] == pytest.approx(3.0 - 0.5 * 2.0, abs=1e-12)


# --------------------------------------------------------------------------
# estimation
# --------------------------------------------------------------------------

def test_fit_recovers_simulated_dgp_5000():
    true = ArmaParams(alpha=0.49, phi=(0.86,), theta=(-0.44,), sigma2=4.0)
    rng = np.random.default_rng(0)
    y, _ = simulate(true, 5600, rng)
    est = fit_mle(y[600:], ArmaSpec(1, 1), n_restarts=2, seed=0)
    assert abs(est.alpha - 0.49) <= 0.05
    assert abs(est.phi[0] - 0.86) <= 0.05
    assert abs(est.theta[0] + 0.44) <= 0.05


def test_median_recovery_over_50_seeds():
    true = ArmaParams(alpha=0.2, phi=(0.6,), theta=(0.3,), sigma2=1.0)
    errs = []
    for seed in range(50):
        rng = np.random.default_rng(seed + 1000)
        y, _ = simulate(true, 2200, rng)
        est = fit_mle(y[200:], ArmaSpec(1, 1), n_restarts=2, seed=0)
        errs.append([abs(est.alpha - 0.2), abs(est.phi[0] - 0.6),
                     abs(est.theta[0] - 0.3), abs(est.sigma2 - 1.0)])
    med = np.median(np.array(errs), axis=0)
    assert np.all(med < 0.03)


def test_equal_weights_match_unweighted_fit():
    true = ArmaParams(alpha=0.49, phi=(0.86,), theta=(-0.44,), sigma2=4.0)
    rng = np.random.default_rng(2)
    y, _ = simulate(true, 900, rng)
    y = y[100:]
    plain = fit_mle(y, ArmaSpec(1, 1), n_restarts=3, seed=0)
    scaled = fit_mle(y, ArmaSpec(1, 1), weights=np.full(y.size, 1.0 / y.size),
                     n_restarts=3, seed=0)
    assert plain.alpha == pytest.approx(scaled.alpha, abs=1e-6)
    assert plain.phi[0] == pytest.approx(scaled.phi[0], abs=1e-6)
    assert plain.theta[0] == pytest.approx(scaled.theta[0], abs=1e-6)
    assert plain.sigma2 == pytest.approx(scaled.sigma2, abs=1e-6)


def test_zero_weighted_suffix_equals_prefix_fit():
    # w_t multiplies each likelihood contribution, so zero-weighting the tail
    # must reproduce the fit on the head exactly
    true = ArmaParams(alpha=0.3, phi=(0.7,), theta=(0.2,), sigma2=1.0)
    rng = np.random.default_rng(9)
    y, _ = simulate(true, 400, rng)
    w = np.concatenate([np.ones(300), np.zeros(100)])
    a = fit_mle(y, ArmaSpec(1, 1), weights=w, n_restarts=2, seed=0)
    b = fit_mle(y[:300], ArmaSpec(1, 1), n_restarts=2, seed=0)
    assert a.alpha == pytest.approx(b.alpha, abs=1e-9)
    assert a.phi[0] == pytest.approx(b.phi[0], abs=1e-9)
    assert a.theta[0] == pytest.approx(b.theta[0], abs=1e-9)
    assert a.sigma2 == pytest.approx(b.sigma2, abs=1e-9)


def test_gradient_norm_small_at_optimum():
    true = ArmaParams(alpha=0.49, phi=(0.86,), theta=(-0.44,), sigma2=4.0)
    rng = np.random.default_rng(11)
    y, _ = simulate(true, 1000, rng)
    y = y[269:]
    est = fit_mle(y, ArmaSpec(1, 1))
    w = np.ones(y.size)

    def neg_avg_ll(u):
        ll, _, ok = arma_weighted_loglik(y - u[0], np.array([np.tanh(u[1])]),
                                         np.array([-np.tanh(u[2])]), w)
        return 1e12 if not ok else -ll / y.size

    u_star = np.array([est.mean, np.arctanh(est.phi[0]),
                       np.arctanh(-est.theta[0])])
    grad = np.empty(3)
    for i in range(3):
        h = 1e-6 * max(1.0, abs(u_star[i]))
        up, dn = u_star.copy(), u_star.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (neg_avg_ll(up) - neg_avg_ll(dn)) / (2.0 * h)
    assert np.linalg.norm(grad) < 1e-4


def test_fit_rejects_bad_input():
    with pytest.raises(DegenerateSample):
        fit_mle(np.full(100, 3.0), ArmaSpec(1, 1))
    with pytest.raises(ValueError):
        fit_mle(np.arange(20.0), ArmaSpec(1, 1))  # too short for 10*(p+q+1)
    rng = np.random.default_rng(0)
    y = rng.normal(size=100)
    with pytest.raises(ValueError):
        fit_mle(y, ArmaSpec(1, 1), weights=np.ones(99))
    with pytest.raises(ValueError):
        fit_mle(y, ArmaSpec(1, 1), weights=np.full(100, -1.0))


def test_fitted_params_are_stationary_invertible():
    rng = np.random.default_rng(21)
    true = ArmaParams(alpha=0.49, phi=(0.86,), theta=(-0.44,), sigma2=4.0)
    y, _ = simulate(true, 500, rng)
    est = fit_mle(y, ArmaSpec(2, 1), n_restarts=2, seed=0)
    # companion-form roots of z^2 - phi1 z - phi2 must lie inside the unit circle
    assert np.all(np.abs(np.roots([1.0, -est.phi[0], -est.phi[1]])) < 1.0)
    assert abs(est.theta[0]) < 1.0
    assert est.sigma2 > 0


# --------------------------------------------------------------------------
# forecasting
# --------------------------------------------------------------------------

def test_constant_mean_forecast():
    params = ArmaParams(alpha=1.7, phi=(), theta=(), sigma2=1.0)
    path = forecast_iterative(params, y_T=9.9, eps_T=2.2, H=5)
    assert np.allclose(path.values, 1.7)


def test_forecast_hand_recursion_arma11():
    params = ArmaParams(alpha=0.5, phi=(0.8,), theta=(-0.4,), sigma2=1.0)
    y_t, e_t = 2.0, 1.0
    path = forecast_iterative(params, y_t, e_t, H=3)
    f1 = 0.5 + 0.8 * y_t - 0.4 * e_t
    f2 = 0.5 + 0.8 * f1          # MA term only enters at h = 1
    f3 = 0.5 + 0.8 * f2
    assert path.values == pytest.approx([f1, f2, f3], abs=1e-12)
    assert path.average == pytest.approx((f1 + f2 + f3) / 3.0, abs=1e-12)


def test_forecast_lag_ordering_ar2():
    params = ArmaParams(alpha=0.0, phi=(0.5, 0.25), theta=(), sigma2=1.0)
    # oldest-to-newest: y_{T-1} = 4, y_T = 2
    path = forecast_iterative(params, [4.0, 2.0], 0.0, H=2)
    f1 = 0.5 * 2.0 + 0.25 * 4.0
    f2 = 0.5 * f1 + 0.25 * 2.0
    assert path.values == pytest.approx([f1, f2], abs=1e-12)


def test_forecast_requires_enough_lags():
    params = ArmaParams(alpha=0.0, phi=(0.5, 0.25), theta=(), sigma2=1.0)
    with pytest.raises(ValueError):
        forecast_iterative(params, 2.0, 0.0, H=2)
    with pytest.raises(ValueError):
        forecast_iterative(params, [4.0, 2.0], 0.0, H=0)


@settings(max_examples=40, deadline=None)
@given(phi=st.floats(-0.9, 0.9), theta=st.floats(-0.9, 0.9),
       y0=st.floats(-50, 50), e0=st.floats(-10, 10))
def test_long_horizon_limit(phi, theta, y0, e0):
    params = ArmaParams(alpha=0.7, phi=(phi,), theta=(theta,), sigma2=1.0)
    path = forecast_iterative(params, y0, e0, H=2000)
    assert abs(path.values[-1] - params.mean) < 1e-6


def test_forecast_path_shift():
    path = ForecastPath(None, 3, np.array([1.0, 2.0, 3.0]))
    shifted = path.shifted(np.array([0.5, -0.5, 1.0]))
    assert shifted.values == pytest.approx([1.5, 1.5, 4.0])
    with pytest.raises(ValueError):
        ForecastPath(None, 2, np.array([1.0, np.nan]))


def test_simulate_chains_segments():
    params = ArmaParams(alpha=0.1, phi=(0.5,), theta=(0.3,), sigma2=1.0)
    rng = np.random.default_rng(4)
    y1, e1 = simulate(params, 50, rng)
    y2, _ = simulate(params, 10, rng, y_init=[y1[-1]], eps_init=[e1[-1]])
    # first chained draw uses the handed-over lags, not cold-start defaults
    rng2 = np.random.default_rng(4)
    _ = rng2.normal(0.0, 1.0, size=50)
    eps_next = rng2.normal(0.0, 1.0, size=10)
    expect = 0.1 + 0.5 * y1[-1] + 0.3 * e1[-1] + eps_next[0]
    assert y2[0] == pytest.approx(expect, abs=1e-12)
