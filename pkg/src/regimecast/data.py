"""Vintage CSV ingestion and the annualized log-difference transform.

Handles two on-disk layouts: the FRED-MD wide layout (first column
``sasdate``, optional second row of integer transform codes) and a plain
two-column date,value file.  Missing cells (empty or literal ``NA``) are
allowed only at the edges of a series; an internal hole is a hard error
because silently interpolating would corrupt every likelihood downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .months import MalformedDate, MonthDate, parse_month

__all__ = [
    "MonthlySeries",
    "InflationSeries",
    "SeriesNotFound",
    "InternalGap",
    "NonPositiveLevel",
    "TooShort",
    "OutOfRange",
    "load_vintage",
    "annualized_log_diff",
    "slice_series",
]


class SeriesNotFound(KeyError):
    """No column with the requested identifier in the file."""


class InternalGap(ValueError):
    """Series has missing observations strictly inside its span."""


class NonPositiveLevel(ValueError):
    """Log transform applied to a non-positive level."""


class TooShort(ValueError):
    """Fewer observations than the operation requires."""


class OutOfRange(IndexError):
    """Requested window extends beyond the series span."""


_MISSING = {"", "NA", "NaN", "nan", ".", None}


@dataclass(frozen=True)
class MonthlySeries:
    """A gap-free monthly observation vector starting at `start`."""

    start: MonthDate
    values: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a non-empty 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite value in series {self.name!r}")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> MonthDate:
        return self.start.plus(len(self) - 1)

    def dates(self) -> list[MonthDate]:
        return [self.start.plus(i) for i in range(len(self))]

    def index_of(self, d: MonthDate) -> int:
        i = self.start.months_until(d)
        if not 0 <= i < len(self):
            raise OutOfRange(f"{d} outside {self.start}..{self.end}")
        return i

    def at(self, d: MonthDate) -> float:
        return float(self.values[self.index_of(d)])


class InflationSeries(MonthlySeries):
    """Annualized percent month-over-month growth; one shorter than its source."""


def _is_missing(cell: object) -> bool:
    if cell is None:
        return True
    if isinstance(cell, float) and math.isnan(cell):
        return True
    return str(cell).strip() in _MISSING


def _looks_like_transform_codes(row: pd.Series) -> bool:
    """FRED-MD's second row holds integer transform codes 1..7 for every series."""
    vals = [c for c in row if not _is_missing(c)]
    if not vals:
        return False
    try:
        codes = [float(c) for c in vals]
    except (TypeError, ValueError):
        return False
    return all(c == int(c) and 1 <= c <= 7 for c in codes)


def load_vintage(path: str | Path, series_id: str) -> MonthlySeries:
    """Load one series from a vintage CSV.

    Parameters
    ----------
    path : file path of a comma-separated text file whose first column holds
        dates ('M/D/YYYY' or 'YYYY-MM') and whose header names the series.
    series_id : column header of the series to extract.

    Returns the contiguous run of non-missing values; leading/trailing
    missing cells are trimmed, an internal hole raises InternalGap.  A
    FRED-MD transform-code second row is detected and skipped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    if series_id not in frame.columns:
        raise SeriesNotFound(f"{series_id!r} not in {path.name} "
                             f"(has {list(frame.columns)[:8]}...)")

    date_col = frame.columns[0]
    if len(frame) and _is_missing(frame.iloc[0][date_col]) \
            and _looks_like_transform_codes(frame.iloc[0, 1:]):
        frame = frame.iloc[1:].reset_index(drop=True)

    dates: list[MonthDate] = []
    cells: list[object] = []
    for raw_date, raw_val in zip(frame[date_col], frame[series_id]):
        if _is_missing(raw_date):
            continue  # blank trailing rows some vintages carry
        dates.append(parse_month(str(raw_date)))
        cells.append(raw_val)

    if not dates:
        raise SeriesNotFound(f"no data rows for {series_id!r} in {path.name}")
    for prev, cur in zip(dates, dates[1:]):
        if prev.months_until(cur) != 1:
            raise MalformedDate(f"dates not consecutive near {cur} in {path.name}")

    present = [not _is_missing(c) for c in cells]
    if not any(present):
        raise SeriesNotFound(f"column {series_id!r} is entirely missing")
    first = present.index(True)
    last = len(present) - 1 - present[::-1].index(True)
    if not all(present[first:last + 1]):
        hole = first + present[first:].index(False)
        raise InternalGap(f"{series_id} missing at {dates[hole]} (internal gap)")

    vals = np.array([float(c) for c in cells[first:last + 1]])
    return MonthlySeries(start=dates[first], values=vals, name=series_id)


def annualized_log_diff(level: MonthlySeries) -> InflationSeries:
    """y_t = 1200 * (ln level_t - ln level_{t-1}), start advances one month."""
    if len(level) < 2:
        raise TooShort("need at least 2 observations to difference")
    if np.any(level.values <= 0.0):
        raise NonPositiveLevel(f"non-positive level in {level.name!r}")
    y = 1200.0 * np.diff(np.log(level.values))
    return InflationSeries(start=level.start.plus(1), values=y, name=level.name)


def slice_series(series: MonthlySeries, lo: MonthDate, hi: MonthDate) -> MonthlySeries:
    """Inclusive window copy of `series` between months lo and hi."""
    if lo > hi:
        raise OutOfRange(f"window start {lo} after end {hi}")
    i, j = series.index_of(lo), series.index_of(hi)
    return type(series)(start=lo, values=series.values[i:j + 1].copy(),
                        name=series.name)
