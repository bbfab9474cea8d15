import csv
import json
import re
from pathlib import Path

import pytest

from gjif.corpus import Corpus, ingest_corpus
from gjif.metrics import MeanKind
from gjif.report import (
    COLUMNS,
    FLAG_NAMES,
    ReportIOError,
    StabilityTable,
    TableRow,
    build_stability_table,
    emit,
    load_json,
    render,
)
from gjif.stability import StabilityConfig, stability_report
from conftest import make_records

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def fixture_corpus():
    corpus, _ = ingest_corpus(DATA / "table_fixture.csv")
    return corpus


@pytest.fixture(scope="module")
def table(fixture_corpus):
    return build_stability_table(
        fixture_corpus, "Agricultural and Biological Sciences",
        ["Insect Science", "Soil Science"], (2004, 2014),
    )


def test_table_shape(table):
    assert len(table.rows) == 2
    assert all(len(r.cells) == 8 for r in table.rows)
    assert [c.key for c in COLUMNS] == [
        "citations_ajif", "citations_gjif", "citations_ajif_10plus", "citations_gjif_10plus",
        "readers_ajif", "readers_gjif", "readers_ajif_10plus", "readers_gjif_10plus",
    ]


def test_cells_match_stability_reports(table, fixture_corpus):
    row = table.rows[0]
    for col in COLUMNS:
        cfg = StabilityConfig(col.source, col.mean_kind, 10 if col.filtered else 0)
        rep = stability_report(fixture_corpus, row.subcategory, (2004, 2014), cfg)
        assert row.cell(col) == rep.average_rho


def test_empty_subcategory_renders_dash(fixture_corpus):
    t = build_stability_table(fixture_corpus, "Decision Sciences",
                              ["Decision Sciences (misc.)", "Nowhere"], (2004, 2014))
    assert all(r.is_dash for r in t.rows)
    md = render(t, "md")
    assert "| Nowhere | - | - | - | - | - | - | - | - |" in md


def test_identical_two_years_every_cell_one():
    base = {"J1": [5, 0, 7] * 4, "J2": [1, 1, 2] * 4, "J3": [20, 3, 1] * 4, "J4": [0, 0, 1] * 4}
    spec = {(j, y): c for j, c in base.items() for y in (2004, 2005)}
    recs = [r.__class__(r.article_id, r.journal_id, r.subcategory, r.year, r.doc_type, r.citations,
                        r.citations * 2 + 1) for r in make_records(spec)]
    t = build_stability_table(Corpus(recs), "C", ["Insect Science"], (2004, 2005))
    assert t.rows[0].cells == (1.0,) * 8
    assert "1.000" in render(t, "md")


def test_flags_consistent_with_cells(table):
    for row in table.rows:
        flags = row.flags
        assert set(flags) == set(FLAG_NAMES)
        for col in COLUMNS:
            if col.mean_kind is not MeanKind.GEOMETRIC:
                continue
            suffix = "_10plus" if col.filtered else ""
            a = row.cells[COLUMNS.index(col) - 1]
            assert flags[f"{col.source.value}{suffix}_gjif_higher_than_ajif"] == (row.cell(col) > a)


def test_markdown_two_rows_three_decimals(table):
    md = render(table, "md")
    body = [l for l in md.splitlines() if l.startswith("| ") and "Sub-category" not in l]
    assert len(body) == 2
    for number in re.findall(r"\d+\.\d+", md.split("-->")[-1]):
        assert len(number.split(".")[1]) == 3


def test_csv_three_decimals_and_flags(table):
    text = render(table, "csv")
    rows = list(csv.DictReader(l for l in text.splitlines() if not l.startswith("#")))
    assert len(rows) == 2
    for row in rows:
        for col in COLUMNS:
            assert re.fullmatch(r"-?\d\.\d{3}|-", row[col.key])
        assert row["citations_gjif_higher_than_ajif"] in ("true", "false", "-")


def test_json_roundtrip(table, tmp_path):
    path = tmp_path / "t.json"
    emit(table, "json", path)
    assert load_json(path) == table
    doc = json.loads(path.read_text())
    cell = doc["rows"][0]["cells"]["citations_gjif"]
    assert cell == table.rows[0].cells[1]  # full precision survives


def test_report_json_roundtrip_and_skip_csv(tmp_path):
    corpus = Corpus(make_records({("J1", 2004): [1], ("J1", 2005): [2]}))
    rep = stability_report(corpus, "Insect Science", (2004, 2005))
    path = tmp_path / "r.json"
    emit(rep, "json", path)
    assert load_json(path) == rep
    text = render(rep, "csv")
    rows = list(csv.DictReader(text.splitlines()))
    assert "skip_reason" in rows[0]
    assert rows[0]["skip_reason"] == "fewer than 3 common journals"
    assert rows[-1]["year_a"] == "average" and rows[-1]["rho"] == "-"


def test_emit_io_error_names_path(table, tmp_path):
    bad = tmp_path / "missing-dir" / "t.md"
    with pytest.raises(ReportIOError, match="missing-dir"):
        emit(table, "md", bad)


def test_unknown_format(table):
    with pytest.raises(ValueError):
        render(table, "xlsx")
