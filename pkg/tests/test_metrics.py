import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gjif.corpus import ArticleRecord, CountSource, DocType
from gjif.metrics import (
    EmptyJournalYearError,
    InconsistentGroupError,
    MeanKind,
    arithmetic_jif,
    geometric_jif,
    mean_log_count,
    score_journal_year,
)
from oracles import mp_arithmetic, mp_geometric

counts_st = st.lists(st.integers(min_value=0, max_value=10_000), min_size=1, max_size=200)


@pytest.mark.parametrize("counts, expected", [([0, 0, 0], 0.0), ([2, 2, 2], 2.0), ([1, 2, 3], 2.0)])
def test_arithmetic_examples(counts, expected):
    assert arithmetic_jif(counts) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("counts, expected", [([0] * 5, 0.0), ([7, 7, 7], 7.0), ([0, 3], 1.0)])
def test_geometric_examples(counts, expected):
    assert geometric_jif(counts) == pytest.approx(expected, abs=1e-12)


def test_systematics_shaped_vector():
    counts = [170, 30] + [0] * 8
    # 1.3574135769856855... from a 50-digit evaluation of the formula
    assert geometric_jif(counts) == pytest.approx(1.3574135769856855, abs=1e-12)
    assert geometric_jif(counts) == pytest.approx(mp_geometric(counts), abs=1e-12)
    assert arithmetic_jif(counts) == 20.0


@pytest.mark.parametrize("fn", [arithmetic_jif, geometric_jif])
def test_empty_is_error(fn):
    with pytest.raises(EmptyJournalYearError, match="empty journal-year"):
        fn([])


@pytest.mark.parametrize("bad", [[-1, 2], [1.5], [float("nan")]])
def test_rejects_non_counts(bad):
    with pytest.raises(ValueError):
        geometric_jif(bad)


@given(counts_st)
@settings(max_examples=300)
def test_matches_high_precision_oracle(counts):
    assert geometric_jif(counts) == pytest.approx(mp_geometric(counts), rel=1e-12, abs=1e-12)
    assert arithmetic_jif(counts) == pytest.approx(mp_arithmetic(counts), rel=1e-12, abs=1e-12)


@given(counts_st)
def test_am_gm(counts):
    a, g = arithmetic_jif(counts), geometric_jif(counts)
    assert 0.0 <= g <= a + 1e-9
    if len(set(counts)) == 1:
        assert a - g <= 1e-9
    else:
        assert a - g > 1e-9


@given(counts_st, st.randoms(use_true_random=False))
def test_permutation_invariance(counts, rnd):
    shuffled = list(counts)
    rnd.shuffle(shuffled)
    assert arithmetic_jif(shuffled) == pytest.approx(arithmetic_jif(counts), abs=1e-9)
    assert geometric_jif(shuffled) == pytest.approx(geometric_jif(counts), abs=1e-9)


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=50), st.data())
def test_strict_monotonicity(counts, data):
    j = data.draw(st.integers(0, len(counts) - 1))
    bumped = list(counts)
    bumped[j] += 1
    assert arithmetic_jif(bumped) > arithmetic_jif(counts)
    assert geometric_jif(bumped) > geometric_jif(counts)


@given(st.lists(st.integers(0, 1000), min_size=1, max_size=60), st.integers(1, 10_000), st.data())
def test_damped_sensitivity(counts, k, data):
    n = len(counts)
    g0 = geometric_jif(counts)
    eligible = [i for i, c in enumerate(counts) if 1 + c >= 1 + g0 - 1e-9]
    j = data.draw(st.sampled_from(eligible))
    shocked = list(counts)
    shocked[j] += k
    assert geometric_jif(shocked) - g0 <= k / n + 1e-9
    assert arithmetic_jif(shocked) - arithmetic_jif(counts) == pytest.approx(k / n, abs=1e-9)


@given(st.lists(counts_st, min_size=2, max_size=8))
def test_order_equivalence_with_mean_log(vectors):
    by_g = sorted(range(len(vectors)), key=lambda i: (geometric_jif(vectors[i]), i))
    by_log = sorted(range(len(vectors)), key=lambda i: (mean_log_count(vectors[i]), i))
    assert by_g == by_log


@given(counts_st, st.sampled_from([2.0, 10.0, 3.7]))
def test_base_independence(counts, base):
    logs = [math.log(1 + c, base) for c in counts]
    via_base = base ** (math.fsum(logs) / len(logs)) - 1
    assert via_base == pytest.approx(geometric_jif(counts), rel=1e-12, abs=1e-12)


def test_large_journal_does_not_overflow():
    counts = np.full(100_000, 10_000)
    assert geometric_jif(counts) == pytest.approx(10_000, rel=1e-12)


def _rec(i, c, r=None, journal="J1", year=2005):
    return ArticleRecord(f"A{i}", journal, "S", year, DocType.ARTICLE, c, r)


def test_score_journal_year_examples():
    s = score_journal_year([_rec(1, 1), _rec(2, 2), _rec(3, 3)], "citations", "arithmetic")
    assert s.value == pytest.approx(2.0) and s.article_count == 3
    s = score_journal_year([_rec(1, 9, None), _rec(2, 9, 3)], CountSource.READERS, MeanKind.GEOMETRIC)
    assert s.value == pytest.approx(1.0, abs=1e-12) and s.article_count == 2
    for kind in MeanKind:
        assert score_journal_year([_rec(1, 5)], "citations", kind).value == pytest.approx(5.0, abs=1e-12)


def test_score_journal_year_errors():
    with pytest.raises(EmptyJournalYearError):
        score_journal_year([], "citations", "arithmetic")
    with pytest.raises(InconsistentGroupError, match="inconsistent group"):
        score_journal_year([_rec(1, 1), _rec(2, 1, journal="J2")], "citations", "geometric")
