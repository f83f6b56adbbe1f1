import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import batch_wls
from regimecast.data import MonthlySeries
from regimecast.experience import (
    AgentBelief,
    MissingPersona,
    NonStationaryBelief,
    PersonaRun,
    SingularR,
    belief_from_history,
    load_persona_runs,
    mn_forecast,
    mn_update,
    persona_gap,
)
from regimecast.months import MonthDate


def _ar1_sample(n=50, seed=5):
    rng = np.random.default_rng(seed)
    pi = np.empty(n + 1)
    pi[0] = 2.0
    for t in range(1, n + 1):
        pi[t] = 1.0 + 0.6 * pi[t - 1] + 0.8 * rng.normal()
    return pi


# --------------------------------------------------------------------------
# recursive updating
# --------------------------------------------------------------------------

def test_first_update_moment_matrix_is_outer_product():
    belief = mn_update(AgentBelief(), 2.5, 3.0)
    x = np.array([1.0, 2.5])
    assert np.array_equal(belief.R, np.outer(x, x))
    assert belief.age == 1
    # minimum-norm unit-gain step fits the observation it just saw
    assert x @ np.array(belief.b) == pytest.approx(3.0, abs=1e-12)


def test_constant_stream_reaches_fixed_point():
    belief = AgentBelief()
    for _ in range(500):
        belief = mn_update(belief, 4.2, 4.2)
    assert belief.intercept + belief.persistence * 4.2 == pytest.approx(
        4.2, abs=1e-10)
    assert belief.perceived_mean == pytest.approx(4.2, abs=1e-10)


def test_full_history_matches_batch_weighted_least_squares():
    pi = _ar1_sample()
    theta = 3.044
    belief = AgentBelief(gain_const=theta)
    gammas = []
    for t in range(1, 51):
        gammas.append(1.0 if belief.age < theta else theta / belief.age)
        belief = mn_update(belief, pi[t - 1], pi[t])
    # weight of observation j in the final belief: its own gain, shrunk by
    # every later step's (1 - gain)
    w = np.array([g * np.prod([1.0 - gm for gm in gammas[j + 1:]])
                  for j, g in enumerate(gammas)])
    x = np.column_stack([np.ones(50), pi[:-1]])
    target = batch_wls(x, pi[1:], w)
    assert np.max(np.abs(np.array(belief.b) - target)) < 1e-8
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_unit_gain_constant_reduces_to_recursive_least_squares():
    # with gain_const = 1 the gain is 1/age, the classic decreasing-gain
    # recursion, which equals expanding ordinary least squares (the first
    # observation's weight is annihilated by the second unit-gain step)
    pi = _ar1_sample()
    belief = AgentBelief(gain_const=1.0)
    for t in range(1, 51):
        belief = mn_update(belief, pi[t - 1], pi[t])
    x = np.column_stack([np.ones(50), pi[:-1]])
    ols, *_ = np.linalg.lstsq(x[1:], pi[2:], rcond=None)
    assert np.max(np.abs(np.array(belief.b) - ols)) < 1e-8


def test_update_guards():
    with pytest.raises(ValueError):
        mn_update(AgentBelief(), np.nan, 1.0)
    with pytest.raises(SingularR):
        mn_update(AgentBelief(), 1e200, 1.0)  # moment matrix overflows
    with pytest.raises(ValueError):
        AgentBelief(R=np.array([[1.0, 0.5], [0.1, 1.0]]))
    with pytest.raises(ValueError):
        AgentBelief(gain_const=0.0)
    with pytest.raises(ValueError):
        AgentBelief(age=-1)


def test_longer_experience_of_high_inflation_raises_belief():
    vals = np.full(732, 2.0)
    vals[120:252] = 9.0  # high-inflation block early in the long career
    vals = vals + 0.5 * np.random.default_rng(3).standard_normal(732)
    hist = MonthlySeries(MonthDate(1960, 1), vals)
    old = belief_from_history(hist, MonthDate(1970, 1))
    young = belief_from_history(hist, MonthDate(2005, 1))
    assert old.perceived_mean > young.perceived_mean
    assert old.persistence > young.persistence
    gap = (mn_forecast(old, vals[-1], 12).average
           - mn_forecast(young, vals[-1], 12).average)
    assert gap > 0

    with pytest.raises(ValueError):
        belief_from_history(hist, MonthDate(1960, 1))  # no pre-career month
    with pytest.raises(ValueError):
        belief_from_history(hist, MonthDate(1970, 1), end=MonthDate(2030, 1))


# --------------------------------------------------------------------------
# forecasting from a belief
# --------------------------------------------------------------------------

def test_forecast_at_perceived_mean_is_flat():
    belief = AgentBelief(b=(1.0, 0.5), R=np.eye(2), age=10)
    path = mn_forecast(belief, belief.perceived_mean, 6)
    assert np.max(np.abs(path.values - belief.perceived_mean)) < 1e-12


def test_zero_persistence_forecasts_intercept():
    belief = AgentBelief(b=(3.0, 0.0), R=np.eye(2), age=10)
    assert np.max(np.abs(mn_forecast(belief, 9.9, 5).values - 3.0)) == 0.0


def test_geometric_reversion_shape():
    belief = AgentBelief(b=(1.0, 0.5), R=np.eye(2), age=10)
    path = mn_forecast(belief, 6.0, 3)
    mean = belief.perceived_mean  # 2.0
    expect = [mean + 0.5 ** h * (6.0 - mean) for h in (1, 2, 3)]
    assert np.allclose(path.values, expect, atol=1e-12)
    assert path.average == pytest.approx(np.mean(expect), abs=1e-12)


def test_nonstationary_belief_rejected():
    hot = AgentBelief(b=(0.5, 1.0), R=np.eye(2), age=10)
    with pytest.raises(NonStationaryBelief):
        mn_forecast(hot, 2.0, 4)
    with pytest.raises(NonStationaryBelief):
        hot.perceived_mean
    with pytest.raises(ValueError):
        mn_forecast(AgentBelief(b=(0.5, 0.2), R=np.eye(2), age=1), 2.0, 0)


# --------------------------------------------------------------------------
# persona runs and the gap
# --------------------------------------------------------------------------

def _run(persona, vintage, run_id, model, level):
    return PersonaRun(persona=persona, vintage=vintage, run_id=run_id,
                      model_id=model, forecasts=(float(level),) * 12)


def test_gap_is_difference_of_pooled_cell_means():
    v = MonthDate(2021, 1)
    runs = [
        _run("Experienced", v, 1, "model-a", 4.0),
        _run("Experienced", v, 2, "model-b", 3.0),
        _run("Young", v, 1, "model-a", 2.0),
        _run("Young", v, 2, "model-b", 1.0),
        _run("Neutral", v, 1, "model-a", 2.5),
        _run("Experienced", MonthDate(2021, 4), 1, "model-a", 9.0),  # other cell
    ]
    gap = persona_gap(runs, v)
    assert gap.mu_E == pytest.approx(3.5, abs=1e-15)
    assert gap.mu_Y == pytest.approx(1.5, abs=1e-15)
    assert gap.delta == pytest.approx(2.0, abs=1e-15)
    assert gap.mu_0 == pytest.approx(2.5, abs=1e-15)
    assert gap.vintage == v


def test_missing_persona_raises():
    v = MonthDate(2021, 1)
    runs = [_run("Experienced", v, 1, "model-a", 4.0)]
    with pytest.raises(MissingPersona):
        persona_gap(runs, v)
    with pytest.raises(MissingPersona):
        persona_gap(runs, MonthDate(2021, 4))


def test_neutral_mean_absent_when_no_neutral_runs():
    v = MonthDate(2021, 1)
    runs = [_run("Experienced", v, 1, "m", 4.0), _run("Young", v, 1, "m", 2.0)]
    assert persona_gap(runs, v).mu_0 is None


@settings(max_examples=60, deadline=None)
@given(
    levels=st.lists(st.integers(min_value=-50, max_value=50), min_size=5,
                    max_size=5),
    shift=st.integers(min_value=-100, max_value=100),
)
def test_gap_exactly_invariant_to_common_shift(levels, shift):
    # integer levels and power-of-two cell sizes keep every mean exact, so
    # the differencing identity can be asserted bit-for-bit
    v = MonthDate(2021, 7)
    personas = ("Experienced", "Experienced", "Young", "Young", "Neutral")
    runs = [_run(p, v, i, "m", float(lev))
            for i, (p, lev) in enumerate(zip(personas, levels))]
    shifted = [PersonaRun(r.persona, r.vintage, r.run_id, r.model_id,
                          tuple(f + shift for f in r.forecasts))
               for r in runs]
    assert persona_gap(shifted, v).delta == persona_gap(runs, v).delta


def test_run_record_validation():
    v = MonthDate(2021, 1)
    with pytest.raises(ValueError):
        _run("Wise", v, 1, "m", 1.0)
    with pytest.raises(ValueError):
        PersonaRun("Young", v, 1, "m", (1.0,) * 11)
    with pytest.raises(ValueError):
        PersonaRun("Young", v, 1, "m", (np.inf,) * 12)


def test_run_record_csv_roundtrip(tmp_path):
    header = ("persona,vintage,run_id,model_id,"
              + ",".join(f"f{i}" for i in range(1, 13)) + ",text_path")
    rows = [
        "Experienced,2021-01,1,model-a," + ",".join(["4.5"] * 12) + ",texts/a.txt",
        "young,2021M01,2,model-b," + ",".join(["2.25"] * 12) + ",",
    ]
    path = tmp_path / "runs.csv"
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    runs = load_persona_runs(path)
    assert len(runs) == 2
    assert runs[0].persona == "Experienced"
    assert runs[0].text_path == "texts/a.txt"
    assert runs[1].persona == "Young"  # case-normalized
    assert runs[1].vintage == MonthDate(2021, 1)
    assert runs[1].text_path is None
    assert runs[1].average == pytest.approx(2.25)

    bad = tmp_path / "bad.csv"
    bad.write_text("persona,vintage\nYoung,2021-01\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_persona_runs(bad)
