"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""

import re
import statistics
import time
from pathlib import Path

import numpy as np
import pytest

from gjif.cli import EXIT_OK, run
from gjif.metrics import MeanKind, arithmetic_jif, geometric_jif
from gjif.report import COLUMNS
from gjif.stability import UndefinedCorrelationError, spearman_rho
from gjif.synth import (
    compare_stability,
    fly_preset,
    run_shock_experiment,
    stability_benchmark_spec,
    systematics_preset,
)
from oracles import brute_spearman

pytestmark = pytest.mark.acceptance

DATA = Path(__file__).parent / "data"


def test_c1_am_gm_invariant(criterion):
    rng = np.random.default_rng(20160101)
    t0 = time.perf_counter()
    violations = equal_cases = equality_mismatch = 0
    for i in range(100_000):
        n = int(rng.integers(1, 501))
        if i % 50 == 0:
            counts = np.full(n, rng.integers(0, 10_001))
        else:
            counts = rng.integers(0, 10_001, size=n)
        a, g = arithmetic_jif(counts), geometric_jif(counts)
        if g > a + 1e-9:
            violations += 1
        all_equal = bool(np.all(counts == counts[0]))
        equal_cases += all_equal
        if (a - g <= 1e-9) != all_equal:
            equality_mismatch += 1
    elapsed = time.perf_counter() - t0
    criterion(
        violations == 0 and equality_mismatch == 0 and elapsed < 30,
        f"1e5 vectors, violations={violations}, equality mismatches={equality_mismatch} "
        f"({equal_cases} constant vectors), {elapsed:.1f}s < 30s",
    )


def test_c2_spearman_oracle_equivalence(criterion):
    rng = np.random.default_rng(7)
    worst, compared = 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(3, 21))
        levels = int(rng.integers(1, 5))  # few distinct values -> heavy ties
        x = rng.integers(0, levels + 1, size=n).tolist()
        y = rng.integers(0, levels + 1, size=n).tolist()
        try:
            rho = spearman_rho(x, y)
        except UndefinedCorrelationError:
            assert len(set(x)) == 1 or len(set(y)) == 1
            continue
        worst = max(worst, abs(rho - brute_spearman(x, y)))
        compared += 1
    hand = spearman_rho([1, 2, 3, 4], [1, 3, 2, 4])
    criterion(
        worst <= 1e-12 and compared >= 800 and abs(hand - 0.8) <= 1e-12,
        f"{compared} tied pairs, max |diff|={worst:.1e} <= 1e-12; rho([1,2,3,4],[1,3,2,4])={hand:.12f}",
    )


def test_c3_exact_kernel_cases(criterion):
    errs = [abs(geometric_jif([0, 3]) - 1.0)]
    for c in [0, 1, 7, 42, 999, 10_000]:
        for n in (1, 2, 17, 500):
            errs.append(abs(geometric_jif([c] * n) - c))
    errs.append(abs(geometric_jif([0] * 25) - 0.0))
    worst = max(errs)
    criterion(worst <= 1e-12, f"gJIF([0,3])=1, constant vectors, all-zero; max error {worst:.1e} <= 1e-12")


def test_c4_systematics_preset(criterion):
    t0 = time.perf_counter()
    exp = run_shock_experiment(systematics_preset())
    elapsed = time.perf_counter() - t0
    a, g = exp.results[MeanKind.ARITHMETIC], exp.results[MeanKind.GEOMETRIC]
    ok = (
        a.year_displacement > g.year_displacement
        and a.rank_after <= 3
        and g.rank_after > a.rank_after
        and elapsed < 5
        and len(exp.shocked_counts) == 10
        and exp.field.n_journals == 20
    )
    criterion(
        ok,
        f"aJIF rank {a.rank_after:g}->{a.following_rank:g} (|d|={a.year_displacement:g}), "
        f"gJIF rank {g.rank_after:g}->{g.following_rank:g} (|d|={g.year_displacement:g}), {elapsed:.2f}s < 5s",
    )


def test_c5_fly_preset(criterion):
    t0 = time.perf_counter()
    exp = run_shock_experiment(fly_preset())
    elapsed = time.perf_counter() - t0
    base = list(exp.baseline)
    med = statistics.median_low(base)
    # direct evaluation, independent of the experiment bookkeeping
    da = arithmetic_jif([192] + base) - arithmetic_jif([med] + base)
    dg = geometric_jif([192] + base) - geometric_jif([med] + base)
    ratio = da / dg
    consistent = (abs(exp.results[MeanKind.ARITHMETIC].delta - da) < 1e-12
                  and abs(exp.results[MeanKind.GEOMETRIC].delta - dg) < 1e-12)
    criterion(
        ratio >= 5 and consistent and elapsed < 1 and len(exp.shocked_counts) == 52,
        f"dAJIF={da:.3f}, dGJIF={dg:.3f}, ratio={ratio:.2f} >= 5, {elapsed:.2f}s < 1s",
    )


def test_c6_stability_superiority(criterion):
    t0 = time.perf_counter()
    wins, gaps = 0, []
    for seed in range(100):
        res = compare_stability(stability_benchmark_spec(seed))
        a, g = res[MeanKind.ARITHMETIC], res[MeanKind.GEOMETRIC]
        wins += g >= a
        gaps.append(g - a)
    elapsed = time.perf_counter() - t0
    criterion(
        wins >= 90 and elapsed < 120,
        f"gJIF >= aJIF in {wins}/100 replicates (mean gap {np.mean(gaps):+.3f}), {elapsed:.1f}s < 120s",
    )


def test_c7_damped_sensitivity(criterion):
    rng = np.random.default_rng(99)
    bad = 0
    for _ in range(10_000):
        counts = rng.integers(0, 1000, size=int(rng.integers(1, 200)))
        k = int(rng.integers(1, 10_001))
        n = counts.size
        shocked = counts.copy()
        shocked[np.argmax(counts)] += k
        dg = geometric_jif(shocked) - geometric_jif(counts)
        da = arithmetic_jif(shocked) - arithmetic_jif(counts)
        if dg > k / n + 1e-9 or abs(da - k / n) > 1e-9:
            bad += 1
    criterion(bad == 0, f"1e4 vectors, violations={bad} (dG <= K/n + 1e-9, dA == K/n within 1e-9)")


def test_c8_pipeline_reproducibility(criterion, tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"table{i}.md"
        code = run(["table", "--input", str(DATA / "table_fixture.csv"), "--output", str(out),
                    "--category", "Agricultural and Biological Sciences",
                    "--subcategory", "Insect Science", "--subcategory", "Soil Science",
                    "--subcategory", "Decision Sciences (misc.)"])
        assert code == EXIT_OK
        outputs.append(out.read_bytes())
    text = outputs[0].decode()
    header = next(l for l in text.splitlines() if l.startswith("| Sub-category"))
    rows = [l for l in text.splitlines() if l.startswith("| ") and l is not header and "Sub-category" not in l]
    cells = [c.strip() for r in rows for c in r.strip("|").split("|")[1:]]
    three_dp = all(re.fullmatch(r"(\*\*)?(<u>)?(\d\.\d{3}|-)(</u>)?(\*\*)?", c) for c in cells)
    dash_row = any(all(c.strip() == "-" for c in r.strip("|").split("|")[1:]) for r in rows)
    value_cols = header.count("|") - 2
    ok = outputs[0] == outputs[1] and three_dp and dash_row and value_cols == len(COLUMNS) == 8 and len(rows) == 3
    criterion(
        ok,
        f"{value_cols} value columns (2 sources x 4), {len(rows)} rows, 3-decimal cells={three_dp}, "
        f"dash row={dash_row}, byte-identical rerun={outputs[0] == outputs[1]}",
    )
