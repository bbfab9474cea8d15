"""Article-level records, validated ingestion and grouped views.

A :class:`Corpus` is built once and never mutated. Rows that fail validation
are reported in a :class:`LoadSummary` rather than dropped silently; a
duplicated ``article_id`` aborts the load.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

logger = logging.getLogger(__name__)

COLUMNS = (
    "article_id",
    "journal_id",
    "subcategory",
    "year",
    "doc_type",
    "citations",
    "readers",
)
REQUIRED_COLUMNS = COLUMNS[:-1]
DEFAULT_YEAR_RANGE = (1900, 2100)


class CorpusError(Exception):
    """Raised when a file cannot be loaded as a corpus at all."""


class CorpusIOError(CorpusError):
    """The input file could not be opened or decoded."""


class DuplicateArticleError(CorpusError):
    pass


class CountSource(str, Enum):
    """Which per-article count feeds the impact indicators."""

    CITATIONS = "citations"
    READERS = "readers"


class DocType(str, Enum):
    ARTICLE = "article"
    OTHER = "other"


@dataclass(frozen=True)
class ArticleRecord:
    article_id: str
    journal_id: str
    subcategory: str
    year: int
    doc_type: DocType
    citations: int
    readers: int | None = None

    def __post_init__(self):
        if self.citations < 0:
            raise ValueError("negative count")
        if self.readers is not None and self.readers < 0:
            raise ValueError("negative count")

    @property
    def is_article(self) -> bool:
        return self.doc_type is DocType.ARTICLE

    def count(self, source: CountSource) -> int:
        """Count for ``source``; an absent reader count is treated as zero."""
        if CountSource(source) is CountSource.CITATIONS:
            return self.citations
        return self.readers if self.readers is not None else 0

    def as_row(self) -> dict:
        return {
            "article_id": self.article_id,
            "journal_id": self.journal_id,
            "subcategory": self.subcategory,
            "year": self.year,
            "doc_type": self.doc_type.value,
            "citations": self.citations,
            "readers": self.readers,
        }


@dataclass(frozen=True)
class RejectedRow:
    line: int
    reason: str
    raw: Mapping[str, object] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class LoadSummary:
    path: str
    total_rows: int
    accepted: int
    rejected: tuple[RejectedRow, ...] = ()
    ignored_columns: tuple[str, ...] = ()

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)

    def reasons(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rejected:
            out[r.reason] = out.get(r.reason, 0) + 1
        return out


GroupKey = tuple[str, int, str]


class Corpus:
    """Immutable collection of :class:`ArticleRecord` indexed by
    ``(subcategory, year, journal_id)``.

    Every record, including non-article document types, appears in the index;
    filtering by document type happens in :func:`group_articles`.
    """

    __slots__ = ("_records", "_index", "_by_id")

    def __init__(self, records: Iterable[ArticleRecord]):
        recs = tuple(records)
        by_id: dict[str, ArticleRecord] = {}
        index: dict[GroupKey, list[ArticleRecord]] = defaultdict(list)
        for rec in recs:
            if rec.article_id in by_id:
                raise DuplicateArticleError(f"duplicate article_id {rec.article_id!r}")
            by_id[rec.article_id] = rec
            index[(rec.subcategory, rec.year, rec.journal_id)].append(rec)
        object.__setattr__(self, "_records", recs)
        object.__setattr__(
            self,
            "_index",
            MappingProxyType({k: tuple(v) for k, v in index.items()}),
        )
        object.__setattr__(self, "_by_id", MappingProxyType(by_id))

    def __setattr__(self, name, value):
        raise AttributeError("Corpus is immutable")

    @property
    def records(self) -> tuple[ArticleRecord, ...]:
        return self._records

    @property
    def index(self) -> Mapping[GroupKey, tuple[ArticleRecord, ...]]:
        return self._index

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[ArticleRecord]:
        return iter(self._records)

    def __getitem__(self, article_id: str) -> ArticleRecord:
        return self._by_id[article_id]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._records == other._records

    def __hash__(self):
        return hash(self._records)

    def __repr__(self) -> str:
        return f"Corpus({len(self)} records)"

    def subcategories(self) -> list[str]:
        return sorted({k[0] for k in self._index})

    def years(self, subcategory: str | None = None) -> list[int]:
        return sorted({k[1] for k in self._index if subcategory in (None, k[0])})

    def journals(self, subcategory: str | None = None) -> list[str]:
        return sorted({k[2] for k in self._index if subcategory in (None, k[0])})


def group_articles(
    corpus: Corpus, subcategory: str, year: int
) -> dict[str, tuple[ArticleRecord, ...]]:
    """Partition the ``article`` records of one subcategory-year by journal.

    Unknown subcategories or years give an empty mapping. Journals are
    returned in sorted id order.
    """
    out: dict[str, tuple[ArticleRecord, ...]] = {}
    for (sub, yr, journal), recs in sorted(corpus.index.items()):
        if sub != subcategory or yr != year:
            continue
        kept = tuple(r for r in recs if r.is_article)
        if kept:
            out[journal] = kept
    return out


# -- ingestion -------------------------------------------------------------


def _parse_count(value, *, optional: bool) -> int | None:
    if value is None or (isinstance(value, str) and value.strip() == ""):
        if optional:
            return None
        raise ValueError("missing count")
    if isinstance(value, bool):
        raise ValueError("unparseable count")
    if isinstance(value, int):
        n = value
    elif isinstance(value, float):
        if not value.is_integer():
            raise ValueError("non-integer count")
        n = int(value)
    else:
        text = str(value).strip()
        try:
            n = int(text)
        except ValueError:
            try:
                f = float(text)
            except ValueError:
                raise ValueError("unparseable count") from None
            if not f.is_integer():
                raise ValueError("non-integer count") from None
            n = int(f)
    if n < 0:
        raise ValueError("negative count")
    return n


def _parse_year(value, year_range: tuple[int, int]) -> int:
    if isinstance(value, bool):
        raise ValueError("unparseable year")
    try:
        year = int(str(value).strip()) if not isinstance(value, int) else value
    except ValueError:
        raise ValueError("unparseable year") from None
    lo, hi = year_range
    if not lo <= year <= hi:
        raise ValueError("year out of range")
    return year


def record_from_mapping(
    row: Mapping[str, object], year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
) -> ArticleRecord:
    """Validate one input row; raises ``ValueError`` carrying the reject reason."""
    def text(key: str) -> str:
        v = row.get(key)
        return "" if v is None else str(v).strip()

    article_id = text("article_id")
    if not article_id:
        raise ValueError("missing article_id")
    journal_id = text("journal_id")
    if not journal_id:
        raise ValueError("missing journal_id")
    subcategory = text("subcategory")
    if not subcategory:
        raise ValueError("missing subcategory")
    year = _parse_year(row.get("year"), year_range)
    doc = text("doc_type").lower()
    # anything that is not an article is kept for audit as "other"
    doc_type = DocType.ARTICLE if doc == "article" else DocType.OTHER
    citations = _parse_count(row.get("citations"), optional=False)
    readers = _parse_count(row.get("readers"), optional=True)
    return ArticleRecord(
        article_id=article_id,
        journal_id=journal_id,
        subcategory=subcategory,
        year=year,
        doc_type=doc_type,
        citations=citations,
        readers=readers,
    )


def _iter_csv(fh) -> tuple[list[str], Iterator[tuple[int, dict]]]:
    reader = csv.DictReader(fh)
    header = list(reader.fieldnames or [])

    def rows():
        for row in reader:
            yield reader.line_num, row

    return header, rows()


def _iter_jsonl(fh) -> tuple[list[str], Iterator[tuple[int, dict]]]:
    lines = [(i, line) for i, line in enumerate(fh, start=1) if line.strip()]
    parsed = []
    keys: list[str] = []
    for i, line in lines:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            obj = None
        if isinstance(obj, dict):
            for k in obj:
                if k not in keys:
                    keys.append(k)
        parsed.append((i, obj))
    return keys, iter(parsed)


def detect_format(path: str | os.PathLike) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    raise CorpusError(f"{path}: cannot infer format from suffix {suffix!r}")


def ingest_corpus(
    path: str | os.PathLike,
    format: str | None = None,
    *,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[Corpus, LoadSummary]:
    """Load a CSV or JSONL article file.

    Parameters
    ----------
    path : path-like
        UTF-8 input file.
    format : {"csv", "jsonl"}, optional
        Inferred from the file suffix when omitted.
    year_range : (int, int)
        Inclusive range of acceptable publication years.

    Returns
    -------
    corpus : Corpus
    summary : LoadSummary
        Accepted and rejected row counts, with one reason per rejected row.

    Raises
    ------
    CorpusError
        Unreadable file, unknown format or missing required columns.
    DuplicateArticleError
        Two accepted rows share an ``article_id``.
    """
    fmt = (format or detect_format(path)).lower()
    if fmt not in ("csv", "jsonl"):
        raise CorpusError(f"{path}: unsupported format {fmt!r}")
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise CorpusIOError(f"{path}: {exc.strerror or exc}") from exc

    with fh:
        try:
            header, rows = _iter_csv(fh) if fmt == "csv" else _iter_jsonl(fh)
            rows = list(rows)
        except UnicodeDecodeError as exc:
            raise CorpusIOError(f"{path}: not valid UTF-8 ({exc.reason})") from exc
        except csv.Error as exc:
            raise CorpusError(f"{path}: {exc}") from exc

    if fmt == "csv" or header:
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing and (fmt == "csv" or rows):
            raise CorpusError(f"{path}: missing required columns {missing}")
    extra = tuple(c for c in header if c not in COLUMNS)
    if extra:
        logger.warning("%s: ignoring extra columns %s", path, list(extra))

    accepted: list[ArticleRecord] = []
    rejected: list[RejectedRow] = []
    seen: dict[str, int] = {}
    for line, row in rows:
        if not isinstance(row, dict):
            rejected.append(RejectedRow(line, "malformed row"))
            continue
        try:
            rec = record_from_mapping(row, year_range)
        except ValueError as exc:
            rejected.append(RejectedRow(line, str(exc), dict(row)))
            continue
        if rec.article_id in seen:
            raise DuplicateArticleError(
                f"{path}: duplicate article_id {rec.article_id!r} "
                f"(lines {seen[rec.article_id]} and {line})"
            )
        seen[rec.article_id] = line
        accepted.append(rec)

    summary = LoadSummary(
        path=str(path),
        total_rows=len(rows),
        accepted=len(accepted),
        rejected=tuple(rejected),
        ignored_columns=extra,
    )
    return Corpus(accepted), summary


def write_corpus(
    corpus: Corpus | Sequence[ArticleRecord],
    path: str | os.PathLike,
    format: str | None = None,
) -> None:
    """Write records in the ingestion schema (inverse of :func:`ingest_corpus`)."""
    fmt = (format or detect_format(path)).lower()
    records = corpus.records if isinstance(corpus, Corpus) else tuple(corpus)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            writer.writeheader()
            for rec in records:
                row = rec.as_row()
                if row["readers"] is None:
                    row["readers"] = ""
                writer.writerow(row)
        elif fmt == "jsonl":
            for rec in records:
                fh.write(json.dumps(rec.as_row()) + "\n")
        else:
            raise CorpusError(f"{path}: unsupported format {fmt!r}")
