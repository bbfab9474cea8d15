"""Arithmetic and geometric journal impact indicators.

The geometric indicator shifts every count by one before averaging in log
space, then shifts back::

    gjif = exp(mean(log(1 + c))) - 1

It is accumulated as a sum of logs, never as a product, so large journals
cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import ArticleRecord, CountSource


class EmptyJournalYearError(ValueError):
    def __init__(self, msg: str = "empty journal-year"):
        super().__init__(msg)


class InconsistentGroupError(ValueError):
    def __init__(self, msg: str = "inconsistent group"):
        super().__init__(msg)


class MeanKind(str, Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"

    @property
    def label(self) -> str:
        return "aJIF" if self is MeanKind.ARITHMETIC else "gJIF"


@dataclass(frozen=True)
class JournalScore:
    journal_id: str
    subcategory: str
    year: int
    source: CountSource
    mean_kind: MeanKind
    value: float
    article_count: int

    def __post_init__(self):
        if self.article_count < 1:
            raise ValueError("article_count must be >= 1")
        if not self.value >= 0:
            raise ValueError("value must be non-negative")


def _as_counts(counts) -> np.ndarray:
    arr = np.asarray(counts)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise EmptyJournalYearError()
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "b" or not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise ValueError("counts must be non-negative integers")
    if np.any(arr < 0):
        raise ValueError("counts must be non-negative integers")
    return arr.astype(np.float64)


def arithmetic_jif(counts: Sequence[int]) -> float:
    """Mean count per article.

    Raises
    ------
    EmptyJournalYearError
        If ``counts`` is empty.
    """
    arr = _as_counts(counts)
    return math.fsum(arr) / arr.size


def mean_log_count(counts: Sequence[int]) -> float:
    """Mean of ``log(1 + c)``; orders journals exactly as :func:`geometric_jif`."""
    arr = _as_counts(counts)
    return math.fsum(np.log1p(arr)) / arr.size


def geometric_jif(counts: Sequence[int]) -> float:
    """Shifted geometric mean count per article.

    Examples
    --------
    >>> geometric_jif([0, 3])
    1.0
    >>> geometric_jif([0, 0, 0])
    0.0
    """
    arr = _as_counts(counts)
    # Scale by the largest shifted count so the logs are of ratios <= 1:
    #   exp(mean(log(1 + c))) == (1 + M) * exp(mean(log((1 + c) / (1 + M))))
    # This keeps absolute error near one ulp of the result even for counts in
    # the tens of thousands, and makes constant vectors exact.
    top = float(arr.max())
    scaled = math.fsum(np.log1p((arr - top) / (1.0 + top))) / arr.size
    value = (1.0 + top) * math.exp(scaled) - 1.0
    # rounding can push a zero result a hair below zero
    return max(value, 0.0)


_KERNELS = {
    MeanKind.ARITHMETIC: arithmetic_jif,
    MeanKind.GEOMETRIC: geometric_jif,
}


def jif(counts: Sequence[int], mean_kind: MeanKind | str) -> float:
    return _KERNELS[MeanKind(mean_kind)](counts)


def score_journal_year(
    group: Sequence[ArticleRecord],
    source: CountSource | str,
    mean_kind: MeanKind | str,
) -> JournalScore:
    """Score one journal-year group of articles.

    All records must share journal, subcategory and year. Missing reader
    counts contribute zero but still count towards ``n``.
    """
    if not group:
        raise EmptyJournalYearError()
    source = CountSource(source)
    mean_kind = MeanKind(mean_kind)
    first = group[0]
    key = (first.journal_id, first.subcategory, first.year)
    if any((r.journal_id, r.subcategory, r.year) != key for r in group):
        raise InconsistentGroupError()
    counts = [r.count(source) for r in group]
    return JournalScore(
        journal_id=first.journal_id,
        subcategory=first.subcategory,
        year=first.year,
        source=source,
        mean_kind=mean_kind,
        value=jif(counts, mean_kind),
        article_count=len(group),
    )
