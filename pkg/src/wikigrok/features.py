"""Page-level features: ordinal activity levels, concentration, editor fractions.

The discretization turns heavy-tailed raw counts (views, references, edits,
reverts) into four ordinal levels by repeatedly thresholding at the mean of the
values not yet assigned. It is computed once over a platform's whole corpus so
levels are comparable across pages; never per-subset.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence


class ActivityLevel(enum.IntEnum):
    """Ordinal activity level; integer values double as regression scores."""

    LOW = 0
    MID = 1
    HIGH = 2
    VERYHIGH = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "ActivityLevel":
        try:
            return _BY_LABEL[label]
        except KeyError:
            raise ValueError(f"unknown activity level {label!r}") from None


_LABELS = {
    ActivityLevel.LOW: "Low",
    ActivityLevel.MID: "Mid",
    ActivityLevel.HIGH: "High",
    ActivityLevel.VERYHIGH: "VeryHigh",
}
_BY_LABEL = {label: level for level, label in _LABELS.items()}


@dataclass(frozen=True)
class PageRecord:
    """One page with raw activity counts, their corpus-wide levels, and outcomes.

    ``included`` is true when the page has a counterpart on the other platform;
    ``rewritten`` is defined only for included pages (None otherwise).
    """

    title: str
    views_raw: float
    references_raw: float
    edits_raw: float
    reverts_raw: float
    views_level: Optional[ActivityLevel] = None
    references_level: Optional[ActivityLevel] = None
    edits_level: Optional[ActivityLevel] = None
    reverts_level: Optional[ActivityLevel] = None
    included: bool = False
    rewritten: Optional[bool] = None


def discretize_iterative_mean(values: Sequence[float]) -> list[ActivityLevel]:
    """Assign each value one of four ordinal levels via iterative mean splits.

    Step k (k = 0, 1, 2): compute the mean of the values not yet assigned;
    values strictly below that mean receive level k (Low, Mid, High). Whatever
    survives all three steps is VeryHigh. Values exactly equal to the running
    mean survive to the next step, so an all-equal input is entirely VeryHigh.

    The result depends only on the multiset of values, not their order.
    Raises ValueError on empty input or any negative/non-finite value.
    """
    if len(values) == 0:
        raise ValueError("cannot discretize an empty value list")
    vals = [float(v) for v in values]
    for v in vals:
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r}")
        if v < 0:
            raise ValueError(f"negative value {v!r}")

    # The three running means are increasing, so assignment reduces to
    # thresholding each value against the first mean it falls strictly below.
    thresholds: list[float] = []
    remaining = vals
    for _ in range(3):
        mu = sum(remaining) / len(remaining)
        thresholds.append(mu)
        remaining = [v for v in remaining if v >= mu]

    levels = []
    for v in vals:
        if v < thresholds[0]:
            levels.append(ActivityLevel.LOW)
        elif v < thresholds[1]:
            levels.append(ActivityLevel.MID)
        elif v < thresholds[2]:
            levels.append(ActivityLevel.HIGH)
        else:
            levels.append(ActivityLevel.VERYHIGH)
    return levels


def attach_levels(records: Sequence[PageRecord]) -> list[PageRecord]:
    """Discretize each raw field over the whole record list and fill the levels."""
    if not records:
        raise ValueError("no records to discretize")
    views = discretize_iterative_mean([r.views_raw for r in records])
    refs = discretize_iterative_mean([r.references_raw for r in records])
    edits = discretize_iterative_mean([r.edits_raw for r in records])
    reverts = discretize_iterative_mean([r.reverts_raw for r in records])
    return [
        replace(
            record,
            views_level=views[i],
            references_level=refs[i],
            edits_level=edits[i],
            reverts_level=reverts[i],
        )
        for i, record in enumerate(records)
    ]


def gini_index(values: Sequence[float]) -> float:
    """Mean-absolute-difference Gini: G = sum_ij |x_i - x_j| / (2 n^2 mean).

    Computed via the sorted-rank identity (O(n log n)); no small-sample
    correction. Raises ValueError on empty input, negative values, or an
    all-zero vector (concentration undefined).

    >>> gini_index([5, 5, 5, 5])
    0.0
    >>> gini_index([0] * 9 + [7])
    0.9
    """
    if len(values) == 0:
        raise ValueError("cannot compute Gini of an empty value list")
    vals = sorted(float(v) for v in values)
    if not math.isfinite(vals[0]) or not math.isfinite(vals[-1]):
        raise ValueError("non-finite value in input")
    if vals[0] < 0:
        raise ValueError(f"negative value {vals[0]!r}")
    total = sum(vals)
    if total == 0:
        raise ValueError("all-zero input: concentration undefined")
    n = len(vals)
    weighted = sum((i + 1) * v for i, v in enumerate(vals))
    return (2.0 * weighted - (n + 1) * total) / (n * total)


def editor_fraction(page_editors: Iterable[str], platform_editors: int) -> float:
    """Fraction of a platform's distinct editors who touched one page.

    ``platform_editors`` is the number of distinct editors active on the whole
    platform inside the analysis window (the denominator); ``page_editors`` is
    the page's editor-id collection (deduplicated here).
    """
    if platform_editors <= 0:
        raise ValueError("platform_editors must be a positive count")
    distinct = len(set(page_editors))
    if distinct > platform_editors:
        raise ValueError(
            f"page has {distinct} editors but platform only {platform_editors}"
        )
    return distinct / platform_editors
