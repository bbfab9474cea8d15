"""Ranking stability from consecutive-year Spearman correlations.

For each pair of adjacent years the journals present in both years (with at
least ``min_articles`` articles in each) are scored in both years and their
values are rank-correlated. The stability of a configuration is the plain
mean of the pairwise correlations that could be computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Corpus, CountSource, group_articles
from .metrics import MeanKind, jif
from .ranking import average_ranks

MIN_COMMON_JOURNALS = 3
DEFAULT_MIN_ARTICLES = 10


class UndefinedCorrelationError(ValueError):
    def __init__(self, msg: str = "undefined correlation"):
        super().__init__(msg)


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Spearman correlation.

    Computed as the Pearson correlation of the average-rank vectors, which is
    exact in the presence of ties (the ``1 - 6 sum d^2 / (n (n^2 - 1))``
    shortcut is not).

    Raises
    ------
    UndefinedCorrelationError
        Fewer than three observations, unequal lengths, or a constant input.
    """
    if len(x) != len(y):
        raise UndefinedCorrelationError("undefined correlation: unequal lengths")
    if len(x) < 3:
        raise UndefinedCorrelationError("undefined correlation: fewer than 3 observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("undefined correlation: zero rank variance")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, rho))


@dataclass(frozen=True)
class StabilityConfig:
    source: CountSource = CountSource.CITATIONS
    mean_kind: MeanKind = MeanKind.ARITHMETIC
    min_articles: int = 0

    def __post_init__(self):
        object.__setattr__(self, "source", CountSource(self.source))
        object.__setattr__(self, "mean_kind", MeanKind(self.mean_kind))
        if self.min_articles < 0:
            raise ValueError("min_articles must be non-negative")

    @property
    def filtered(self) -> bool:
        # a journal needs one article to have a score at all, so <= 1 is no filter
        return self.min_articles > 1

    @property
    def label(self) -> str:
        return self.mean_kind.label + (f" {self.min_articles}+" if self.filtered else "")


@dataclass(frozen=True)
class PairCorrelation:
    subcategory: str
    year_a: int
    year_b: int
    source: CountSource
    mean_kind: MeanKind
    filtered: bool
    common_journals: int
    rho: float | None = None
    skip_reason: str | None = None

    def __post_init__(self):
        if self.year_b != self.year_a + 1:
            raise ValueError("year_b must equal year_a + 1")
        if (self.rho is None) == (self.skip_reason is None):
            raise ValueError("exactly one of rho and skip_reason must be set")
        if self.rho is not None and abs(self.rho) > 1.0:
            raise ValueError("rho outside [-1, 1]")

    @property
    def skipped(self) -> bool:
        return self.rho is None


@dataclass(frozen=True)
class StabilityReport:
    subcategory: str
    source: CountSource
    mean_kind: MeanKind
    filtered: bool
    min_articles: int
    pairs: tuple[PairCorrelation, ...] = field(default_factory=tuple)

    @property
    def computed(self) -> tuple[PairCorrelation, ...]:
        return tuple(p for p in self.pairs if not p.skipped)

    @property
    def skipped_count(self) -> int:
        return len(self.pairs) - len(self.computed)

    @property
    def average_rho(self) -> float | None:
        """Mean rho over non-skipped pairs; ``None`` when every pair was skipped."""
        rhos = [p.rho for p in self.computed]
        if not rhos:
            return None
        return math.fsum(rhos) / len(rhos)

    @property
    def defined(self) -> bool:
        return self.average_rho is not None


def _journal_values(
    corpus: Corpus, subcategory: str, year: int, config: StabilityConfig
) -> dict[str, float]:
    threshold = max(config.min_articles, 1)
    out = {}
    for journal, recs in group_articles(corpus, subcategory, year).items():
        if len(recs) >= threshold:
            out[journal] = jif([r.count(config.source) for r in recs], config.mean_kind)
    return out


def consecutive_pair(
    corpus: Corpus,
    subcategory: str,
    year: int,
    config: StabilityConfig = StabilityConfig(),
) -> PairCorrelation:
    """Correlate the journal values of ``year`` and ``year + 1``.

    Degenerate pairs (fewer than three common journals, constant values) are
    returned as skipped rather than raised.
    """
    va = _journal_values(corpus, subcategory, year, config)
    vb = _journal_values(corpus, subcategory, year + 1, config)
    common = sorted(va.keys() & vb.keys())
    base = dict(
        subcategory=subcategory,
        year_a=year,
        year_b=year + 1,
        source=config.source,
        mean_kind=config.mean_kind,
        filtered=config.filtered,
        common_journals=len(common),
    )
    if len(common) < MIN_COMMON_JOURNALS:
        return PairCorrelation(
            **base, skip_reason=f"fewer than {MIN_COMMON_JOURNALS} common journals"
        )
    try:
        rho = spearman_rho([va[j] for j in common], [vb[j] for j in common])
    except UndefinedCorrelationError as exc:
        return PairCorrelation(**base, skip_reason=str(exc))
    return PairCorrelation(**base, rho=rho)


def stability_report(
    corpus: Corpus,
    subcategory: str,
    years: tuple[int, int] | range,
    config: StabilityConfig = StabilityConfig(),
) -> StabilityReport:
    """One :class:`PairCorrelation` per consecutive pair in an inclusive year range."""
    first, last = (years.start, years.stop - 1) if isinstance(years, range) else years
    if last - first < 1:
        raise ValueError("year range must span at least 2 years")
    pairs = tuple(consecutive_pair(corpus, subcategory, y, config) for y in range(first, last))
    return StabilityReport(
        subcategory=subcategory,
        source=config.source,
        mean_kind=config.mean_kind,
        filtered=config.filtered,
        min_articles=config.min_articles,
        pairs=pairs,
    )

