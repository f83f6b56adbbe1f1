"""Monthly calendar arithmetic.

Everything downstream is indexed by calendar month, so dates are a plain
(year, month) pair with total ordering and integer arithmetic.  No days, no
timezones, no pandas Timestamps leaking into the numerics.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering


class MalformedDate(ValueError):
    """A date string could not be parsed as a calendar month."""


@total_ordering
@dataclass(frozen=True)
class MonthDate:
    """A calendar month, e.g. MonthDate(1973, 1) for 1973M01."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise MalformedDate(f"month out of range: {self.month}")

    # -- ordering / arithmetic ------------------------------------------------

    def _index(self) -> int:
        return self.year * 12 + (self.month - 1)

    def __lt__(self, other: "MonthDate") -> bool:
        return self._index() < other._index()

    def plus(self, months: int) -> "MonthDate":
        """The month `months` steps ahead (negative steps back)."""
        idx = self._index() + months
        return MonthDate(idx // 12, idx % 12 + 1)

    def months_until(self, other: "MonthDate") -> int:
        """Signed number of months from self to other (0 for equal dates)."""
        return other._index() - self._index()

    def __str__(self) -> str:
        return f"{self.year:04d}M{self.month:02d}"


_PATTERNS = (
    re.compile(r"^(\d{4})M(\d{1,2})$"),          # 1973M01
    re.compile(r"^(\d{4})-(\d{1,2})(?:-\d{1,2})?$"),  # 1973-01 or 1973-01-01
)
_MDY = re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$")   # FRED-MD sasdate, 1/1/1973


def parse_month(text: str) -> MonthDate:
    """Parse '1973M01', '1973-01[-dd]' or FRED-MD 'M/D/YYYY' (day ignored)."""
    s = text.strip()
    for pat in _PATTERNS:
        m = pat.match(s)
        if m:
            return MonthDate(int(m.group(1)), int(m.group(2)))
    m = _MDY.match(s)
    if m:
        return MonthDate(int(m.group(3)), int(m.group(1)))
    raise MalformedDate(f"unrecognized month format: {text!r}")


def month_range(start: MonthDate, end: MonthDate) -> list[MonthDate]:
    """Inclusive list of months from start to end."""
    n = start.months_until(end)
    if n < 0:
        raise ValueError(f"{start} is after {end}")
    return [start.plus(i) for i in range(n + 1)]
