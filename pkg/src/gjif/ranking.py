"""Per field-year journal rankings with a minimum-article filter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus, CountSource, group_articles
from .metrics import JournalScore, MeanKind, score_journal_year


class InconsistentScoresError(ValueError):
    def __init__(self, msg: str = "inconsistent scores"):
        super().__init__(msg)


def average_ranks(values: Sequence[float], *, descending: bool = False) -> np.ndarray:
    """Rank ``values`` from 1, giving tied values the mean of the ranks they span.

    With ``descending=True`` the largest value gets rank 1.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("values must be one-dimensional")
    n = arr.size
    key = -arr if descending else arr
    order = np.argsort(key, kind="mergesort")
    sorted_key = key[order]
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i + 1
        while j < n and sorted_key[j] == sorted_key[i]:
            j += 1
        # positions i..j-1 hold ranks i+1..j
        ranks[order[i:j]] = 0.5 * (i + 1 + j)
        i = j
    return ranks


@dataclass(frozen=True)
class RankEntry:
    journal_id: str
    value: float
    article_count: int
    rank: float


@dataclass(frozen=True)
class RankingTable:
    subcategory: str
    year: int
    source: CountSource
    mean_kind: MeanKind
    min_articles: int
    entries: tuple[RankEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def ranks(self) -> dict[str, float]:
        return {e.journal_id: e.rank for e in self.entries}

    def values(self) -> dict[str, float]:
        return {e.journal_id: e.value for e in self.entries}


def rank_journals(scores: Sequence[JournalScore], min_articles: int = 0) -> RankingTable:
    """Build a descending ranking, dropping journals with fewer than
    ``min_articles`` articles.

    Ties share the average of their ranks; entries with equal values are
    listed in ``journal_id`` order.
    """
    if min_articles < 0:
        raise ValueError("min_articles must be non-negative")
    if not scores:
        raise ValueError("no scores to rank")
    first = scores[0]
    config = (first.subcategory, first.year, first.source, first.mean_kind)
    if any((s.subcategory, s.year, s.source, s.mean_kind) != config for s in scores):
        raise InconsistentScoresError()
    ids = [s.journal_id for s in scores]
    if len(set(ids)) != len(ids):
        raise InconsistentScoresError("duplicate journal ids")

    kept = sorted(
        (s for s in scores if s.article_count >= min_articles),
        key=lambda s: (-s.value, s.journal_id),
    )
    ranks = average_ranks([s.value for s in kept], descending=True)
    entries = tuple(
        RankEntry(s.journal_id, s.value, s.article_count, float(r))
        for s, r in zip(kept, ranks)
    )
    return RankingTable(
        subcategory=first.subcategory,
        year=first.year,
        source=first.source,
        mean_kind=first.mean_kind,
        min_articles=min_articles,
        entries=entries,
    )


def score_field_year(
    corpus: Corpus,
    subcategory: str,
    year: int,
    source: CountSource | str = CountSource.CITATIONS,
    mean_kind: MeanKind | str = MeanKind.ARITHMETIC,
) -> list[JournalScore]:
    """Score every journal with at least one article in a subcategory-year."""
    groups = group_articles(corpus, subcategory, year)
    return [score_journal_year(g, source, mean_kind) for g in groups.values()]


def build_ranking(
    corpus: Corpus,
    subcategory: str,
    year: int,
    source: CountSource | str = CountSource.CITATIONS,
    mean_kind: MeanKind | str = MeanKind.ARITHMETIC,
    min_articles: int = 0,
) -> RankingTable:
    scores = score_field_year(corpus, subcategory, year, source, mean_kind)
    if not scores:
        return RankingTable(
            subcategory, year, CountSource(source), MeanKind(mean_kind), min_articles, ()
        )
    return rank_journals(scores, min_articles)
