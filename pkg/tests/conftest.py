import csv
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gjif.corpus import ArticleRecord, Corpus, DocType

HEADER = ["article_id", "journal_id", "subcategory", "year", "doc_type", "citations", "readers"]


def make_records(spec, subcategory="Insect Science", doc_type=DocType.ARTICLE):
    """``spec`` maps (journal, year) to a list of citation counts."""
    records = []
    for (journal, year), counts in spec.items():
        for k, c in enumerate(counts):
            records.append(ArticleRecord(
                f"{subcategory}-{journal}-{year}-{k}", journal, subcategory, year, doc_type, c, None
            ))
    return records


@pytest.fixture
def write_csv(tmp_path):
    def _write(rows, name="articles.csv", header=HEADER):
        path = tmp_path / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        return path

    return _write


@pytest.fixture
def three_journal_corpus():
    spec = {
        ("J1", 2005): [1, 2, 3],
        ("J2", 2005): [0, 4],
        ("J3", 2005): [10],
        ("J1", 2006): [2, 2],
        ("J2", 2006): [5, 0, 1],
        ("J3", 2006): [3, 3, 9],
    }
    return Corpus(make_records(spec))


@pytest.fixture
def identical_years_corpus():
    base = {"J1": [5, 0, 7], "J2": [1, 1, 2], "J3": [20, 3, 1], "J4": [0, 0, 1]}
    spec = {}
    for year in (2004, 2005):
        for j, counts in base.items():
            spec[(j, year)] = counts
    return Corpus(make_records(spec))


_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""
    name = request.node.name

    def record(ok: bool, detail: str):
        _CRITERIA[name] = (bool(ok), detail)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
