"""Arithmetic and geometric journal impact indicators and ranking stability."""

__version__ = "0.1.0"

from .corpus import (
    ArticleRecord,
    Corpus,
    CorpusError,
    CountSource,
    DocType,
    DuplicateArticleError,
    LoadSummary,
    group_articles,
    ingest_corpus,
    write_corpus,
)
from .metrics import (
    EmptyJournalYearError,
    JournalScore,
    MeanKind,
    arithmetic_jif,
    geometric_jif,
    score_journal_year,
)
from .ranking import RankingTable, average_ranks, build_ranking, rank_journals
from .stability import (
    PairCorrelation,
    StabilityConfig,
    StabilityReport,
    UndefinedCorrelationError,
    consecutive_pair,
    spearman_rho,
    stability_report,
)

__all__ = [
    "ArticleRecord",
    "Corpus",
    "CorpusError",
    "CountSource",
    "DocType",
    "DuplicateArticleError",
    "EmptyJournalYearError",
    "JournalScore",
    "LoadSummary",
    "MeanKind",
    "PairCorrelation",
    "RankingTable",
    "StabilityConfig",
    "StabilityReport",
    "UndefinedCorrelationError",
    "arithmetic_jif",
    "average_ranks",
    "build_ranking",
    "consecutive_pair",
    "geometric_jif",
    "group_articles",
    "ingest_corpus",
    "rank_journals",
    "score_journal_year",
    "spearman_rho",
    "stability_report",
    "write_corpus",
]
