"""Experience-based learning of perceived inflation dynamics.

An agent recursively estimates a perceived AR(1) for inflation with a gain
that decays with the agent's age, so the data experienced over a lifetime set
the effective observation weights.  The module also ingests stored forecast
run records and computes the experienced-minus-young persona gap, which is
invariant to any common shift in the runs' forecast levels.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .arma import ForecastPath
from .data import MonthlySeries
from .months import MonthDate, parse_month

GAIN_CONST_DEFAULT = 3.044

PERSONAS = ("Experienced", "Young", "Neutral")


class SingularR(np.linalg.LinAlgError):
    """Moment matrix cannot be inverted after the burn-in phase."""


class NonStationaryBelief(ValueError):
    """Perceived persistence has magnitude >= 1; no long-run mean exists."""


class MissingPersona(ValueError):
    """A requested vintage lacks runs for a required persona."""


@dataclass(frozen=True)
class AgentBelief:
    """Recursive perceived-AR(1) state of one learning agent.

    ``b = (intercept, persistence)`` and ``R`` is the running second-moment
    matrix of the regressor ``x = (1, previous inflation)``.  ``age`` counts
    updates since ``career_start``; the gain is 1 until ``age`` reaches
    ``gain_const`` and decays as ``gain_const / age`` afterwards.
    """

    b: tuple[float, float] = (0.0, 0.0)
    R: np.ndarray = None  # type: ignore[assignment]
    career_start: MonthDate = MonthDate(1970, 1)
    gain_const: float = GAIN_CONST_DEFAULT
    age: int = 0

    def __post_init__(self) -> None:
        if self.R is None:
            object.__setattr__(self, "R", np.zeros((2, 2)))
        r = np.asarray(self.R, dtype=float)
        if r.shape != (2, 2) or not np.all(np.isfinite(r)):
            raise ValueError("R must be a finite 2x2 matrix")
        if abs(r[0, 1] - r[1, 0]) > 1e-10 * (1.0 + abs(r[0, 1])):
            raise ValueError("R must be symmetric")
        object.__setattr__(self, "R", r)
        object.__setattr__(self, "b", (float(self.b[0]), float(self.b[1])))
        if not self.gain_const > 0:
            raise ValueError("gain_const must be positive")
        if self.age < 0:
            raise ValueError("age must be non-negative")

    @property
    def intercept(self) -> float:
        return self.b[0]

    @property
    def persistence(self) -> float:
        return self.b[1]

    @property
    def perceived_mean(self) -> float:
        """Long-run perceived inflation, intercept / (1 - persistence)."""
        if abs(self.persistence) >= 1.0:
            raise NonStationaryBelief(
                f"persistence {self.persistence:.4f} has no long-run mean")
        return self.intercept / (1.0 - self.persistence)


def mn_update(belief: AgentBelief, pi_prev: float, pi_curr: float) -> AgentBelief:
    """One constant-then-decaying-gain recursive update of the belief.

    The regressor is ``x = (1, pi_prev)`` and the target ``pi_curr``.  While
    the moment matrix is still singular (it has rank one through the whole
    unit-gain burn-in) the update uses the Moore-Penrose inverse, which keeps
    the running identity ``R b = weighted sum of x * pi`` intact so the full
    recursion matches batch weighted least squares once R gains full rank.
    """
    if not (math.isfinite(pi_prev) and math.isfinite(pi_curr)):
        raise ValueError("inflation observations must be finite")
    gamma = 1.0 if belief.age < belief.gain_const else belief.gain_const / belief.age
    x = np.array([1.0, pi_prev])
    r_new = belief.R + gamma * (np.outer(x, x) - belief.R)
    if not np.all(np.isfinite(r_new)):
        raise SingularR("moment matrix is not finite")
    b_old = np.array(belief.b)
    err = pi_curr - float(x @ b_old)
    if np.linalg.cond(r_new) < 1e12:
        step = np.linalg.solve(r_new, x)
    else:
        # rank-deficient moment matrix (always the case through the unit-gain
        # burn-in, and permanently under a constant stream): x stays in the
        # matrix's range, so the minimum-norm solve is exact along the
        # directions the agent has actually observed
        step = np.linalg.pinv(r_new) @ x
    b_new = b_old + gamma * step * err
    if not np.all(np.isfinite(b_new)):
        raise SingularR("belief update did not produce finite coefficients")
    return replace(belief, b=(float(b_new[0]), float(b_new[1])), R=r_new,
                   age=belief.age + 1)


def belief_from_history(series: MonthlySeries, career_start: MonthDate,
                        gain_const: float = GAIN_CONST_DEFAULT,
                        end: MonthDate | None = None) -> AgentBelief:
    """Run the recursion over ``series`` from the agent's career start.

    The first update targets the ``career_start`` month (its regressor is the
    month before, which must exist in ``series``); updates continue through
    ``end`` (default: the end of the series).
    """
    end = series.end if end is None else end
    if career_start <= series.start:
        raise ValueError("series must start before career_start")
    if end > series.end or career_start > end:
        raise ValueError("update span must lie inside the series")
    belief = AgentBelief(career_start=career_start, gain_const=gain_const)
    i0 = series.index_of(career_start)
    i1 = series.index_of(end)
    vals = series.values
    for t in range(i0, i1 + 1):
        belief = mn_update(belief, vals[t - 1], vals[t])
    return belief


def mn_forecast(belief: AgentBelief, pi_t: float, horizon: int,
                origin: MonthDate | None = None) -> ForecastPath:
    """Forecast by mean-reverting toward the perceived long-run mean.

    Horizon-h value: perceived_mean + persistence**h * (pi_t - perceived_mean).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if abs(belief.persistence) >= 1.0:
        raise NonStationaryBelief(
            f"persistence {belief.persistence:.4f} >= 1 in magnitude")
    mean = belief.perceived_mean
    beta = belief.persistence
    values = np.array([mean + beta ** h * (pi_t - mean)
                       for h in range(1, horizon + 1)])
    return ForecastPath(origin=origin, horizon=horizon, values=values)


# ---------------------------------------------------------------------------
# stored forecast run records and the persona gap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PersonaRun:
    """One stored 12-month forecast path produced under a persona prompt."""

    persona: str
    vintage: MonthDate
    run_id: int
    model_id: str
    forecasts: tuple[float, ...]
    text_path: str | None = None

    def __post_init__(self) -> None:
        if self.persona not in PERSONAS:
            raise ValueError(f"persona must be one of {PERSONAS}")
        fc = tuple(float(v) for v in self.forecasts)
        if len(fc) != 12 or not all(math.isfinite(v) for v in fc):
            raise ValueError("forecasts must be 12 finite values")
        object.__setattr__(self, "forecasts", fc)

    @property
    def average(self) -> float:
        return float(np.mean(self.forecasts))


@dataclass(frozen=True)
class PersonaGap:
    """Experienced-minus-young difference in mean forecasts at a vintage."""

    vintage: MonthDate
    delta: float
    mu_E: float
    mu_Y: float
    mu_0: float | None = None


def load_persona_runs(path: str | Path) -> list[PersonaRun]:
    """Read run records from CSV (persona,vintage,run_id,model_id,f1..f12,text_path)."""
    path = Path(path)
    expected = (["persona", "vintage", "run_id", "model_id"]
                + [f"f{i}" for i in range(1, 13)] + ["text_path"])
    runs: list[PersonaRun] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != expected:
            raise ValueError(f"unexpected run-record header in {path}")
        for row in reader:
            runs.append(PersonaRun(
                persona=row["persona"].strip().capitalize(),
                vintage=parse_month(row["vintage"]),
                run_id=int(row["run_id"]),
                model_id=row["model_id"].strip(),
                forecasts=tuple(float(row[f"f{i}"]) for i in range(1, 13)),
                text_path=row["text_path"].strip() or None,
            ))
    return runs


def persona_gap(runs: list[PersonaRun], vintage: MonthDate) -> PersonaGap:
    """Cell means at a vintage, pooled across models; delta = mu_E - mu_Y."""
    cell: dict[str, list[float]] = {p: [] for p in PERSONAS}
    for run in runs:
        if run.vintage == vintage:
            cell[run.persona].append(run.average)
    for needed in ("Experienced", "Young"):
        if not cell[needed]:
            raise MissingPersona(f"no {needed} runs at vintage {vintage}")
    mu_e = float(np.mean(cell["Experienced"]))
    mu_y = float(np.mean(cell["Young"]))
    mu_0 = float(np.mean(cell["Neutral"])) if cell["Neutral"] else None
    return PersonaGap(vintage=vintage, delta=mu_e - mu_y, mu_E=mu_e,
                      mu_Y=mu_y, mu_0=mu_0)
