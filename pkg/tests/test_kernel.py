import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regimecast.arma import ArmaParams, ArmaSpec, filter_residuals, fit_mle, forecast_iterative, simulate
from regimecast.kernel import (
    KernelWeights,
    NoFeasibleBandwidth,
    StateSeries,
    ZeroMass,
    cv_score,
    default_bandwidth_grid,
    effective_sample_size,
    gaussian_weights,
    kernel_forecast,
    oil_growth_state,
    select_bandwidth,
)
from regimecast.data import MonthlySeries
from regimecast.months import MonthDate


def test_flat_kernel_limit():
    z = np.array([-3.0, 0.0, 7.0, 2.0])
    kw = gaussian_weights(z, 0.0, 1e9)
    assert np.allclose(kw.weights, 0.25, atol=1e-12)
    assert kw.ess == pytest.approx(4.0, abs=1e-6)


def test_three_point_hand_computation():
    # raw kernel values (1, 1, e^{-50}); third point is annihilated
    kw = gaussian_weights(np.array([0.0, 0.0, 10.0]), 0.0, 1.0)
    assert kw.weights[0] == kw.weights[1]
    assert kw.weights[2] < 1e-20
    assert kw.ess == pytest.approx(2.0, abs=1e-6)
    assert kw.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_zero_mass_raised():
    with pytest.raises(ZeroMass):
        gaussian_weights(np.array([1000.0, 2000.0]), 0.0, 0.1)


def test_kernel_weights_validation():
    with pytest.raises(ValueError):
        KernelWeights(weights=np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        KernelWeights(weights=np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        gaussian_weights(np.array([1.0]), 0.0, -1.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40),
       st.floats(-100, 100), st.floats(0.1, 1e6))
def test_normalization_and_ess_bounds(z, z_t, b):
    z = np.asarray(z)
    try:
        kw = gaussian_weights(z, z_t, b)
    except ZeroMass:
        return
    assert abs(kw.weights.sum() - 1.0) <= 1e-12
    assert kw.ess == pytest.approx(effective_sample_size(kw.weights), abs=1e-12)
    assert 1.0 - 1e-9 <= kw.ess <= z.size + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=2, max_size=20),
       st.integers(-50, 50), st.integers(-1000, 1000))
def test_shift_invariance_exact(z_int, z_t, shift):
    # integer-valued states so the shifted differences are bit-identical
    z = np.asarray(z_int, dtype=float)
    a = gaussian_weights(z, float(z_t), 3.0)
    b = gaussian_weights(z + shift, float(z_t + shift), 3.0)
    assert np.array_equal(a.weights, b.weights)


def test_singleton_grid_and_floor():
    z = np.array([0.0, 1.0, 2.0, 50.0] * 20)
    y = np.sin(np.arange(80)) + 2.0
    assert select_bandwidth(y, z, 0.0, [5.0], ess_floor=3.0,
                            spec=ArmaSpec(1, 0)) == 5.0
    with pytest.raises(NoFeasibleBandwidth):
        select_bandwidth(y, z, 0.0, [0.01], ess_floor=30.0, spec=ArmaSpec(1, 0))
    with pytest.raises(ValueError):
        select_bandwidth(y, z, 0.0, [], ess_floor=3.0, spec=ArmaSpec(1, 0))


def test_two_regime_cv_prefers_local_bandwidth():
    # regimes keyed to the state: mean 8 when z = 10, mean 0 when z = 0;
    # forecasting at z_T = 10 should favor a bandwidth that isolates the
    # high-state months
    rng = np.random.default_rng(12)
    n = 240
    z = np.zeros(n)
    for k in range(0, n, 24):
        if (k // 24) % 2 == 1:
            z[k:k + 24] = 10.0
    y = np.where(z == 10.0, 8.0, 0.0) + rng.normal(0, 0.5, n)

    s_local = cv_score(y, z, 10.0, 2.0, ArmaSpec(1, 0))
    s_flat = cv_score(y, z, 10.0, 1e9, ArmaSpec(1, 0))
    assert s_local < s_flat
    assert select_bandwidth(y, z, 10.0, [2.0, 1e9], ess_floor=5.0,
                            spec=ArmaSpec(1, 0)) == 2.0


def test_flat_bandwidth_forecast_nests_unweighted():
    true = ArmaParams(alpha=0.49, phi=(0.86,), theta=(-0.44,), sigma2=4.0)
    rng = np.random.default_rng(7)
    yv, _ = simulate(true, 400, rng)
    yv = yv[100:]
    z = rng.normal(0.0, 20.0, yv.size)
    path = kernel_forecast(yv, z, 1e9, yv[-1], 12, ArmaSpec(1, 1))

    params = fit_mle(yv, ArmaSpec(1, 1))
    eps = filter_residuals(yv, params)[-1]
    unadj = forecast_iterative(params, yv[-1], eps, 12)
    assert np.max(np.abs(path.values - unadj.values)) < 1e-3


def test_alignment_guard():
    with pytest.raises(ValueError):
        kernel_forecast(np.zeros(50), np.zeros(49), 1.0, 0.0, 2, ArmaSpec(1, 0))
    with pytest.raises(ValueError):
        cv_score(np.zeros(50), np.zeros(49), 0.0, 1.0, ArmaSpec(1, 0))


def test_default_grid_span():
    z = np.array([0.0, 1.0, 2.0, 3.0] * 10)
    grid = default_bandwidth_grid(z)
    sd = np.std(z)
    assert grid.size == 60
    assert grid[0] == pytest.approx(0.05 * sd)
    assert grid[-1] == pytest.approx(50.0 * sd)
    assert np.all(np.diff(grid) > 0)


def test_oil_growth_state_transform():
    levels = MonthlySeries(MonthDate(2000, 1),
                           np.array([20.0, 20.0 * np.exp(0.01), 20.0 * np.exp(0.03)]))
    z = oil_growth_state(levels)
    assert isinstance(z, StateSeries)
    assert z.start == MonthDate(2000, 2)
    assert z.values == pytest.approx([12.0, 24.0], abs=1e-9)
