"""Dictionary-based indicators over forecast-reasoning texts.

Four indicators, each expressed per 1,000 words: net sentiment (hawkish minus
dovish), net uncertainty (hedging minus certainty), net temporal orientation
(forward- minus backward-looking), and the frequency of 1970s references.
Matching is exact at the token level: text is lowercased, split on
whitespace, edge punctuation stripped from each token, and each dictionary is
scanned left to right, longest phrase first, without overlaps.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

__all__ = [
    "Dictionary", "TextIndicators", "CellIndicators", "EmptyText",
    "DICTIONARIES", "score_text", "aggregate_cells",
]


class EmptyText(ValueError):
    """Text contains no words after whitespace normalization."""


@dataclass(frozen=True)
class Dictionary:
    """A named term list; each term is a tuple of interchangeable variants."""

    name: str
    terms: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("dictionary must be non-empty")
        flat = [v for term in self.terms for v in term]
        if len(set(flat)) != len(flat):
            raise ValueError("duplicate pattern in dictionary")
        if any(v != v.lower() or not v.strip() for v in flat):
            raise ValueError("patterns must be lowercase and non-blank")

    @property
    def patterns(self) -> list[tuple[str, ...]]:
        """All variant patterns, pre-tokenized, longest first."""
        pats = [tuple(v.split()) for term in self.terms for v in term]
        return sorted(pats, key=len, reverse=True)


def _d(name: str, *terms: str | tuple[str, ...]) -> Dictionary:
    return Dictionary(name, tuple((t,) if isinstance(t, str) else t
                                  for t in terms))


HAWKISH = _d(
    "hawkish",
    "alarm", "alarming", "dangerous", "worrisome", "concern", "warning",
    "overheating", "overshoot", "spiral", "ratchet",
    ("accelerate", "accelerating", "acceleration"),
    ("underestimate", "underestimating"),
    ("complacent", "complacency"),
    "risk to the upside", "upside risk", "too low", "behind the curve",
    "inflation problem",
)

DOVISH = _d(
    "dovish",
    "benign", "modest", "moderate", "contained", "manageable", "normal",
    "calm", "controlled", "well-behaved", "well behaved",
    ("reassure", "reassuring"),
    "downside risk", "risk to the downside", "overshoot unlikely",
    "return to",
    ("normalize", "normalization"),
    "converge", "settle",
    ("dissipate", "dissipating"),
)

HEDGING = _d(
    "hedging",
    "could", "might", "may", "perhaps", "possibly", "uncertain", "unclear",
    "depends", "if", "whether", "hard to say", "difficult to predict",
    "range of", "scenario", "on the other hand", "however", "but",
    "although", "not clear", "remain to be seen", "question",
)

CERTAINTY = _d(
    "certainty",
    "clearly", "certainly", "obvious", "undoubtedly", "no doubt",
    "confident", "conviction", "strongly believe", "will definitely",
    "inevitable", "unambiguous",
)

FORWARD = _d(
    "forward",
    "will", "expect", "forecast",
    ("anticipate", "anticipating", "anticipation"),
    "project", "predict", "likely", "outlook", "going forward", "ahead",
    "coming months", "second half", "rest of", "by december", "by year-end",
    "by year end",
)

BACKWARD = _d(
    "backward",
    "history", "historical", "past", "previously",
    ("in the 1970", "in the 1970s"),
    ("in the 1980", "in the 1980s"),
    "in 2008", "in 2009", "in 2010", "in 2011", "great moderation",
    "great recession", "volcker", "burns", "remember", "memory",
    "experienced", "lesson", "precedent", "analogy",
)

SEVENTIES = _d(
    "seventies",
    "1970", "1973", "1974", "opec", "oil shock", "stagflation", "volcker",
    "burns",
)

DICTIONARIES = {d.name: d for d in
                (HAWKISH, DOVISH, HEDGING, CERTAINTY, FORWARD, BACKWARD,
                 SEVENTIES)}


@dataclass(frozen=True)
class TextIndicators:
    """Per-1,000-word indicator values for one text."""

    sentiment: float
    uncertainty: float
    temporal: float
    seventies: float
    word_count: int

    def __post_init__(self) -> None:
        if self.word_count < 1:
            raise ValueError("word_count must be >= 1")
        if self.seventies < 0:
            raise ValueError("seventies frequency cannot be negative")


def _tokens(text: str) -> tuple[list[str], int]:
    raw = text.lower().split()
    stripped = [t.strip(string.punctuation) for t in raw]
    return stripped, len(raw)


def count_terms(tokens: list[str], dictionary: Dictionary) -> int:
    """Greedy left-to-right, longest-first, non-overlapping occurrences."""
    patterns = dictionary.patterns
    count = 0
    i = 0
    n = len(tokens)
    while i < n:
        for pat in patterns:
            k = len(pat)
            if i + k <= n and tuple(tokens[i:i + k]) == pat:
                count += 1
                i += k
                break
        else:
            i += 1
    return count


def score_text(text: str,
               dictionaries: dict[str, Dictionary] = DICTIONARIES
               ) -> TextIndicators:
    """Score one reasoning text against the four indicator formulas."""
    tokens, n_words = _tokens(text)
    if n_words == 0:
        raise EmptyText("text has no words")
    c = {name: count_terms(tokens, d) for name, d in dictionaries.items()}
    scale = 1000.0 / n_words
    return TextIndicators(
        sentiment=(c["hawkish"] - c["dovish"]) * scale,
        uncertainty=(c["hedging"] - c["certainty"]) * scale,
        temporal=(c["forward"] - c["backward"]) * scale,
        seventies=c["seventies"] * scale,
        word_count=n_words,
    )


@dataclass(frozen=True)
class CellIndicators:
    """Mean indicators over the runs of one persona-vintage cell."""

    persona: str
    vintage: object  # MonthDate
    sentiment: float
    uncertainty: float
    temporal: float
    seventies: float
    n_runs: int


def aggregate_cells(scored) -> list[CellIndicators]:
    """Average indicators within each (persona, vintage) cell.

    ``scored`` is an iterable of (PersonaRun, TextIndicators) pairs; cells
    are pooled across models and returned sorted by vintage then persona.
    """
    cells: dict[tuple, list[TextIndicators]] = {}
    for run, ind in scored:
        cells.setdefault((run.vintage, run.persona), []).append(ind)
    persona_order = {"Experienced": 0, "Young": 1, "Neutral": 2}
    out = []
    for (vintage, persona) in sorted(cells,
                                     key=lambda k: (str(k[0]),
                                                    persona_order[k[1]])):
        inds = cells[(vintage, persona)]
        n = len(inds)
        out.append(CellIndicators(
            persona=persona, vintage=vintage,
            sentiment=sum(i.sentiment for i in inds) / n,
            uncertainty=sum(i.uncertainty for i in inds) / n,
            temporal=sum(i.temporal for i in inds) / n,
            seventies=sum(i.seventies for i in inds) / n,
            n_runs=n,
        ))
    return out
