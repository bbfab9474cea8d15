"""Stability tables and serialisation to CSV, JSON and Markdown.

A stability table has one row per subcategory and eight value columns: for
each count source the arithmetic and geometric indicators, unfiltered and
restricted to journals with at least ``min_articles`` articles. Human formats
(CSV, Markdown) print three decimals and a dash for undefined cells; JSON
keeps full precision and round-trips through :func:`load_json`.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, CountSource
from .metrics import JournalScore, MeanKind
from .ranking import RankingTable
from .stability import (
    DEFAULT_MIN_ARTICLES,
    PairCorrelation,
    StabilityConfig,
    StabilityReport,
    stability_report,
)

FORMATS = ("csv", "json", "md")
DASH = "-"
SCHEMA_VERSION = 1


class ReportIOError(OSError):
    pass


@dataclass(frozen=True)
class TableColumn:
    source: CountSource
    mean_kind: MeanKind
    filtered: bool

    @property
    def key(self) -> str:
        return f"{self.source.value}_{'g' if self.mean_kind is MeanKind.GEOMETRIC else 'a'}jif" + (
            "_10plus" if self.filtered else ""
        )

    def label(self, min_articles: int = DEFAULT_MIN_ARTICLES) -> str:
        return self.mean_kind.label + (f" {min_articles}+" if self.filtered else "")


COLUMNS: tuple[TableColumn, ...] = tuple(
    TableColumn(source, kind, filtered)
    for source in CountSource
    for filtered in (False, True)
    for kind in (MeanKind.ARITHMETIC, MeanKind.GEOMETRIC)
)

SOURCE_TITLES = {CountSource.CITATIONS: "Citations", CountSource.READERS: "Readers"}


def _flag_names() -> list[str]:
    names = []
    for filtered in (False, True):
        suffix = "_10plus" if filtered else ""
        for source in CountSource:
            names.append(f"{source.value}{suffix}_gjif_higher_than_ajif")
        names.append(f"readers{suffix}_gjif_higher_than_citations_gjif")
    return names


FLAG_NAMES = tuple(_flag_names())


@dataclass(frozen=True)
class TableRow:
    subcategory: str
    cells: tuple[float | None, ...]
    pairs_used: tuple[int, ...]

    def cell(self, column: TableColumn) -> float | None:
        return self.cells[COLUMNS.index(column)]

    @property
    def is_dash(self) -> bool:
        return all(c is None for c in self.cells)

    @property
    def flags(self) -> dict[str, bool | None]:
        """Which value of each compared pair is strictly higher; ``None`` if undefined."""

        def higher(a, b):
            if a is None or b is None:
                return None
            return a > b

        out = {}
        for filtered in (False, True):
            suffix = "_10plus" if filtered else ""
            for source in CountSource:
                g = self.cell(TableColumn(source, MeanKind.GEOMETRIC, filtered))
                a = self.cell(TableColumn(source, MeanKind.ARITHMETIC, filtered))
                out[f"{source.value}{suffix}_gjif_higher_than_ajif"] = higher(g, a)
            out[f"readers{suffix}_gjif_higher_than_citations_gjif"] = higher(
                self.cell(TableColumn(CountSource.READERS, MeanKind.GEOMETRIC, filtered)),
                self.cell(TableColumn(CountSource.CITATIONS, MeanKind.GEOMETRIC, filtered)),
            )
        return out


@dataclass(frozen=True)
class StabilityTable:
    category: str
    years: tuple[int, int]
    min_articles: int
    rows: tuple[TableRow, ...]

    @property
    def columns(self) -> tuple[TableColumn, ...]:
        return COLUMNS


def build_stability_table(
    corpus: Corpus,
    category: str,
    subcategories: Sequence[str],
    years: tuple[int, int] = (2004, 2014),
    min_articles: int = DEFAULT_MIN_ARTICLES,
) -> StabilityTable:
    """Run all eight stability configurations for each subcategory.

    A subcategory without any computable pair yields a dash row.
    """
    if not subcategories:
        raise ValueError("subcategory list must be non-empty")
    rows = []
    for sub in subcategories:
        cells, used = [], []
        for col in COLUMNS:
            config = StabilityConfig(col.source, col.mean_kind, min_articles if col.filtered else 0)
            rep = stability_report(corpus, sub, years, config)
            cells.append(rep.average_rho)
            used.append(len(rep.computed))
        rows.append(TableRow(sub, tuple(cells), tuple(used)))
    return StabilityTable(category, tuple(years), min_articles, tuple(rows))


# -- dict conversion ---------------------------------------------------------


def pair_to_dict(p: PairCorrelation) -> dict:
    return {
        "subcategory": p.subcategory,
        "year_a": p.year_a,
        "year_b": p.year_b,
        "source": p.source.value,
        "mean_kind": p.mean_kind.value,
        "filtered": p.filtered,
        "common_journals": p.common_journals,
        "rho": p.rho,
        "skip_reason": p.skip_reason,
    }


def report_to_dict(r: StabilityReport) -> dict:
    return {
        "type": "stability_report",
        "schema_version": SCHEMA_VERSION,
        "subcategory": r.subcategory,
        "source": r.source.value,
        "mean_kind": r.mean_kind.value,
        "filtered": r.filtered,
        "min_articles": r.min_articles,
        "average_rho": r.average_rho,
        "skipped_pairs": r.skipped_count,
        "pairs": [pair_to_dict(p) for p in r.pairs],
    }


def report_from_dict(d: Mapping) -> StabilityReport:
    return StabilityReport(
        subcategory=d["subcategory"],
        source=CountSource(d["source"]),
        mean_kind=MeanKind(d["mean_kind"]),
        filtered=d["filtered"],
        min_articles=d["min_articles"],
        pairs=tuple(
            PairCorrelation(
                subcategory=p["subcategory"],
                year_a=p["year_a"],
                year_b=p["year_b"],
                source=CountSource(p["source"]),
                mean_kind=MeanKind(p["mean_kind"]),
                filtered=p["filtered"],
                common_journals=p["common_journals"],
                rho=p["rho"],
                skip_reason=p["skip_reason"],
            )
            for p in d["pairs"]
        ),
    )


def table_to_dict(t: StabilityTable) -> dict:
    return {
        "type": "stability_table",
        "schema_version": SCHEMA_VERSION,
        "category": t.category,
        "years": list(t.years),
        "min_articles": t.min_articles,
        "columns": [c.key for c in COLUMNS],
        "rows": [
            {
                "subcategory": row.subcategory,
                "cells": dict(zip((c.key for c in COLUMNS), row.cells)),
                "pairs_used": dict(zip((c.key for c in COLUMNS), row.pairs_used)),
                "flags": row.flags,
            }
            for row in t.rows
        ],
    }


def table_from_dict(d: Mapping) -> StabilityTable:
    keys = [c.key for c in COLUMNS]
    if list(d["columns"]) != keys:
        raise ValueError("unexpected column layout")
    rows = tuple(
        TableRow(
            r["subcategory"],
            tuple(r["cells"][k] for k in keys),
            tuple(r["pairs_used"][k] for k in keys),
        )
        for r in d["rows"]
    )
    return StabilityTable(d["category"], tuple(d["years"]), d["min_articles"], rows)


def score_rows(scores: Iterable[JournalScore]) -> list[dict]:
    """Pivot scores to one row per journal-year with a column per source and mean."""
    rows: dict[tuple, dict] = {}
    for s in scores:
        key = (s.subcategory, s.year, s.journal_id)
        row = rows.setdefault(
            key,
            {"subcategory": s.subcategory, "year": s.year, "journal_id": s.journal_id,
             "article_count": s.article_count},
        )
        row[f"{s.source.value}_{s.mean_kind.label.lower()}"] = s.value
    return [rows[k] for k in sorted(rows)]


def ranking_rows(tables: Iterable[RankingTable]) -> list[dict]:
    out = []
    for t in tables:
        for e in t.entries:
            out.append({
                "subcategory": t.subcategory,
                "year": t.year,
                "source": t.source.value,
                "mean_kind": t.mean_kind.value,
                "min_articles": t.min_articles,
                "rank": e.rank,
                "journal_id": e.journal_id,
                "value": e.value,
                "article_count": e.article_count,
            })
    return out


def to_dict(obj) -> dict:
    if isinstance(obj, StabilityTable):
        return table_to_dict(obj)
    if isinstance(obj, StabilityReport):
        return report_to_dict(obj)
    if isinstance(obj, RankingTable):
        return {"type": "ranking", "schema_version": SCHEMA_VERSION, "rows": ranking_rows([obj])}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def from_dict(d: Mapping):
    kind = d.get("type")
    if kind == "stability_table":
        return table_from_dict(d)
    if kind == "stability_report":
        return report_from_dict(d)
    if kind == "stability_reports":
        return [report_from_dict(r) for r in d["reports"]]
    raise ValueError(f"unknown document type {kind!r}")


# -- rendering ---------------------------------------------------------------


def fmt3(value) -> str:
    if value is None:
        return DASH
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence], preamble: Mapping | None) -> str:
    buf = io.StringIO()
    for key, value in (preamble or {}).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt3(v) for v in row])
    return buf.getvalue()


def _table_csv(t: StabilityTable, preamble) -> str:
    header = ["subcategory"] + [c.key for c in COLUMNS] + list(FLAG_NAMES)
    rows = []
    for row in t.rows:
        flags = row.flags
        rows.append([row.subcategory, *row.cells, *(flags[f] for f in FLAG_NAMES)])
    return _csv_text(header, rows, preamble)


PAIR_HEADER = ("subcategory", "year_a", "year_b", "source", "mean_kind", "filtered",
               "common_journals", "rho", "skip_reason")


def _report_csv(reports: Sequence[StabilityReport], preamble) -> str:
    rows = []
    for r in reports:
        for p in r.pairs:
            d = pair_to_dict(p)
            d["skip_reason"] = p.skip_reason or ""
            rows.append([d[h] for h in PAIR_HEADER])
        avg = r.average_rho
        rows.append([
            r.subcategory, "average", "", r.source.value, r.mean_kind.value, r.filtered,
            "", avg, "" if avg is not None else "no computable pairs",
        ])
    return _csv_text(PAIR_HEADER, rows, preamble)


def _md_cell(value: float | None, bold: bool, underline: bool) -> str:
    text = fmt3(value)
    if underline:
        text = f"<u>{text}</u>"
    if bold:
        text = f"**{text}**"
    return text


def _table_md(t: StabilityTable, preamble) -> str:
    lines = []
    if preamble:
        lines.append(f"<!-- {json.dumps(dict(preamble), sort_keys=True)} -->")
    lines.append(
        f"**{t.category}**: average Spearman correlation between consecutive-year "
        f"journal rankings, {t.years[0]}-{t.years[1]}."
    )
    lines.append("")
    heads = [f"{SOURCE_TITLES[c.source]} {c.label(t.min_articles)}" for c in COLUMNS]
    lines.append("| Sub-category | " + " | ".join(heads) + " |")
    lines.append("|---|" + "---:|" * len(COLUMNS))
    for row in t.rows:
        flags = row.flags
        cells = []
        for c in COLUMNS:
            suffix = "_10plus" if c.filtered else ""
            if c.mean_kind is MeanKind.GEOMETRIC:
                bold = flags[f"{c.source.value}{suffix}_gjif_higher_than_ajif"] is True
            else:
                bold = flags[f"{c.source.value}{suffix}_gjif_higher_than_ajif"] is False
            underline = False
            if c.mean_kind is MeanKind.GEOMETRIC:
                cmp = flags[f"readers{suffix}_gjif_higher_than_citations_gjif"]
                underline = cmp is (c.source is CountSource.READERS)
            cells.append(_md_cell(row.cell(c), bold, underline))
        lines.append(f"| {row.subcategory} | " + " | ".join(cells) + " |")
    lines.append("")
    lines.append(
        "Bold: higher of aJIF and gJIF. Underlined: higher of the two sources' gJIF. "
        f"{t.min_articles}+ variants exclude journals publishing fewer than "
        f"{t.min_articles} articles in a year. '-': no computable year pair."
    )
    return "\n".join(lines) + "\n"


def _report_md(r: StabilityReport, preamble) -> str:
    lines = []
    if preamble:
        lines.append(f"<!-- {json.dumps(dict(preamble), sort_keys=True)} -->")
    label = r.mean_kind.label + (f" {r.min_articles}+" if r.filtered else "")
    lines.append(f"**{r.subcategory}**, {r.source.value} {label}")
    lines.append("")
    lines.append("| Years | Common journals | rho | Note |")
    lines.append("|---|---:|---:|---|")
    for p in r.pairs:
        lines.append(f"| {p.year_a}-{p.year_b} | {p.common_journals} | {fmt3(p.rho)} | {p.skip_reason or ''} |")
    lines.append(f"| average | | {fmt3(r.average_rho)} | {r.skipped_count} skipped |")
    return "\n".join(lines) + "\n"


def _rows_md(rows: Sequence[Mapping], preamble) -> str:
    lines = []
    if preamble:
        lines.append(f"<!-- {json.dumps(dict(preamble), sort_keys=True)} -->")
    if not rows:
        return "\n".join(lines + ["(no rows)"]) + "\n"
    header = list(rows[0].keys())
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for row in rows:
        lines.append("| " + " | ".join(fmt3(row.get(h)) for h in header) + " |")
    return "\n".join(lines) + "\n"


def render(obj, format: str, preamble: Mapping | None = None) -> str:
    """Serialise a table, report, ranking or list of row dicts to text."""
    fmt = format.lower()
    if fmt == "markdown":
        fmt = "md"
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {format!r}")
    if fmt == "json":
        if isinstance(obj, list) and obj and isinstance(obj[0], StabilityReport):
            doc = {"type": "stability_reports", "schema_version": SCHEMA_VERSION,
                   "reports": [report_to_dict(r) for r in obj]}
        elif isinstance(obj, list):
            doc = {"type": "rows", "schema_version": SCHEMA_VERSION, "rows": obj}
        else:
            doc = to_dict(obj)
        if preamble:
            doc = {**doc, "run_config": dict(preamble)}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if isinstance(obj, StabilityTable):
        return _table_csv(obj, preamble) if fmt == "csv" else _table_md(obj, preamble)
    if isinstance(obj, StabilityReport):
        obj = [obj]
    if isinstance(obj, list) and obj and all(isinstance(r, StabilityReport) for r in obj):
        if fmt == "csv":
            return _report_csv(obj, preamble)
        return "\n".join(_report_md(r, preamble if i == 0 else None) for i, r in enumerate(obj))
    if isinstance(obj, RankingTable):
        obj = ranking_rows([obj])
    if isinstance(obj, list):
        if fmt == "md":
            return _rows_md(obj, preamble)
        header = list(obj[0].keys()) if obj else []
        return _csv_text(header, ([r.get(h) for h in header] for r in obj), preamble)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a sibling temporary file and rename it into place."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise ReportIOError(f"{path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise ReportIOError(f"{path}: {exc.strerror or exc}") from exc


def emit(obj, format: str, destination: str | os.PathLike, preamble: Mapping | None = None) -> None:
    atomic_write(destination, render(obj, format, preamble))


def load_json(path: str | os.PathLike):
    """Re-parse a JSON document written by :func:`emit`."""
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))
