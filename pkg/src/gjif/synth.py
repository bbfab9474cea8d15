"""Seeded synthetic citation fields and single-article shock experiments.

Counts are drawn from a discretised lognormal::

    count = max(floor(exp(Normal(mu_j + jitter_jt, sigma))) - 1, 0)

where ``mu_j`` is the journal's log-scale location and ``jitter_jt`` an
optional per journal-year perturbation with standard deviation ``drift``.

All randomness comes from NumPy's ``PCG64`` bit generator seeded through
``SeedSequence(seed)``; citation and reader streams are spawned as
independent children, so switching reader generation on or off leaves the
citation counts untouched.
"""

from __future__ import annotations

import dataclasses
import math
import os
import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import ArticleRecord, Corpus, CountSource, DocType
from .metrics import MeanKind
from .ranking import build_ranking

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence"

# keeps floor() exact when exp() lands a rounding error below an integer
_FLOOR_GUARD = 1e-9


class FieldSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    """Parameters of one synthetic subcategory.

    ``journal_location`` fixes each journal's log-scale location; when it is
    empty the locations are drawn from ``Normal(location_mean, location_sd)``.
    ``articles_per_journal`` is either a fixed count or an inclusive
    ``(low, high)`` range drawn per journal-year.
    """

    n_journals: int = 20
    years: tuple[int, int] = (2004, 2014)
    articles_per_journal: int | tuple[int, int] = 30
    journal_location: tuple[float, ...] = ()
    location_mean: float = 1.5
    location_sd: float = 0.5
    journal_scale: float = 1.0
    drift: float = 0.0
    shock_rate: float = 0.0
    shock_count: int = 100
    seed: int = 0
    subcategory: str = "synthetic"
    readers: bool = False
    reader_location_shift: float = 1.0
    reader_scale: float | None = None

    def __post_init__(self):
        if isinstance(self.journal_location, (list, np.ndarray)):
            object.__setattr__(self, "journal_location", tuple(float(v) for v in self.journal_location))
        if isinstance(self.years, list):
            object.__setattr__(self, "years", tuple(self.years))
        if isinstance(self.articles_per_journal, list):
            object.__setattr__(self, "articles_per_journal", tuple(self.articles_per_journal))
        self.validate()

    def validate(self) -> None:
        if self.n_journals < 1:
            raise FieldSpecError("n_journals must be positive")
        first, last = self.years
        if last < first:
            raise FieldSpecError("empty year range")
        if not self.journal_scale > 0:
            raise FieldSpecError("journal_scale must be > 0")
        if self.reader_scale is not None and not self.reader_scale > 0:
            raise FieldSpecError("reader_scale must be > 0")
        if self.drift < 0 or self.location_sd < 0:
            raise FieldSpecError("drift and location_sd must be >= 0")
        if not 0.0 <= self.shock_rate <= 1.0:
            raise FieldSpecError("shock_rate must lie in [0, 1]")
        if self.shock_count < 1:
            raise FieldSpecError("shock_count must be positive")
        apj = self.articles_per_journal
        lo, hi = (apj, apj) if isinstance(apj, int) else apj
        if lo < 1 or hi < lo:
            raise FieldSpecError("articles_per_journal must be positive")
        if self.journal_location and len(self.journal_location) != self.n_journals:
            raise FieldSpecError("journal_location must have one entry per journal")

    @property
    def year_list(self) -> list[int]:
        return list(range(self.years[0], self.years[1] + 1))

    def journal_ids(self) -> list[str]:
        width = max(2, len(str(self.n_journals - 1)))
        return [f"J{j:0{width}d}" for j in range(self.n_journals)]

    def replace(self, **changes) -> "FieldSpec":
        return dataclasses.replace(self, **changes)


def discretised_lognormal(rng: np.random.Generator, loc, scale: float, size) -> np.ndarray:
    draws = np.exp(rng.normal(loc, scale, size=size))
    return np.maximum(np.floor(draws + _FLOOR_GUARD) - 1, 0).astype(np.int64)


def _locations(spec: FieldSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.journal_location:
        return np.asarray(spec.journal_location, dtype=np.float64)
    return rng.normal(spec.location_mean, spec.location_sd, size=spec.n_journals)


def generate_counts(spec: FieldSpec) -> dict[tuple[str, int], dict[str, np.ndarray]]:
    """Draw per journal-year count arrays keyed by ``(journal_id, year)``.

    Each value maps ``"citations"`` (and ``"readers"`` when enabled) to an
    integer array, one entry per article.
    """
    cite_seq, reader_seq = np.random.SeedSequence(spec.seed).spawn(2)
    rng = np.random.Generator(np.random.PCG64(cite_seq))
    reader_rng = np.random.Generator(np.random.PCG64(reader_seq))
    mu = _locations(spec, rng)
    reader_scale = spec.reader_scale or spec.journal_scale
    apj = spec.articles_per_journal
    out: dict[tuple[str, int], dict[str, np.ndarray]] = {}
    for year in spec.year_list:
        for j, journal in enumerate(spec.journal_ids()):
            n = apj if isinstance(apj, int) else int(rng.integers(apj[0], apj[1] + 1))
            loc = mu[j] + (rng.normal(0.0, spec.drift) if spec.drift > 0 else 0.0)
            cites = discretised_lognormal(rng, loc, spec.journal_scale, n)
            if spec.shock_rate > 0 and rng.random() < spec.shock_rate:
                cites[rng.integers(n)] = spec.shock_count
            counts = {"citations": cites}
            if spec.readers:
                rloc = mu[j] + spec.reader_location_shift
                if spec.drift > 0:
                    rloc += reader_rng.normal(0.0, spec.drift)
                counts["readers"] = discretised_lognormal(reader_rng, rloc, reader_scale, n)
            out[(journal, year)] = counts
    return out


def corpus_from_counts(
    counts: Mapping[tuple[str, int], Mapping[str, Sequence[int]]], subcategory: str
) -> Corpus:
    records = []
    for (journal, year), by_source in counts.items():
        cites = by_source["citations"]
        readers = by_source.get("readers")
        for k, c in enumerate(cites):
            records.append(
                ArticleRecord(
                    article_id=f"{subcategory}:{journal}:{year}:{k:04d}",
                    journal_id=journal,
                    subcategory=subcategory,
                    year=year,
                    doc_type=DocType.ARTICLE,
                    citations=int(c),
                    readers=None if readers is None else int(readers[k]),
                )
            )
    return Corpus(records)


def generate_corpus(spec: FieldSpec) -> Corpus:
    """Build a deterministic synthetic corpus for ``spec``."""
    return corpus_from_counts(generate_counts(spec), spec.subcategory)


# -- configuration files -----------------------------------------------------

_FIELD_TYPES = {f.name: f for f in dataclasses.fields(FieldSpec)}


def _format_value(name: str, value) -> str:
    if value is None:
        return ""
    if name == "years":
        return f"{value[0]}:{value[1]}"
    if name == "articles_per_journal":
        return str(value) if isinstance(value, int) else f"{value[0]}:{value[1]}"
    if name == "journal_location":
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(name: str, text: str):
    text = text.strip()
    if name == "years":
        a, b = text.split(":")
        return (int(a), int(b))
    if name == "articles_per_journal":
        if ":" in text:
            a, b = text.split(":")
            return (int(a), int(b))
        return int(text)
    if name == "journal_location":
        return tuple(float(v) for v in text.split(",") if v.strip())
    if name == "reader_scale":
        return float(text) if text else None
    if name in ("readers",):
        if text.lower() in ("true", "yes", "1"):
            return True
        if text.lower() in ("false", "no", "0"):
            return False
        raise FieldSpecError(f"{name}: expected a boolean, got {text!r}")
    if name == "subcategory":
        return text
    if name in ("n_journals", "shock_count", "seed"):
        return int(text)
    return float(text)


def dump_field_spec(spec: FieldSpec) -> str:
    """Render ``spec`` as ``key = value`` lines."""
    lines = [f"# synthetic field; rng = {RNG_ALGORITHM}"]
    for name in _FIELD_TYPES:
        lines.append(f"{name} = {_format_value(name, getattr(spec, name))}")
    return "\n".join(lines) + "\n"


def parse_field_spec(text: str) -> FieldSpec:
    """Parse ``key = value`` lines; ``#`` starts a comment, unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FieldSpecError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise FieldSpecError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _parse_value(key, value)
        except (ValueError, TypeError) as exc:
            raise FieldSpecError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return FieldSpec(**values)


def read_field_spec(path: str | os.PathLike) -> FieldSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_field_spec(fh.read())


def write_field_spec(spec: FieldSpec, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_field_spec(spec))


# -- shock experiments -------------------------------------------------------


@dataclass(frozen=True)
class ShockOutcome:
    """Position of the shocked journal under one mean kind.

    ``*_before`` is the shock year with the shock article replaced by the
    journal median, ``*_after`` the shock year with the shock present and
    ``following_*`` the next, unshocked year.
    """

    mean_kind: MeanKind
    value_before: float
    value_after: float
    rank_before: float
    rank_after: float
    following_value: float
    following_rank: float

    @property
    def delta(self) -> float:
        return self.value_after - self.value_before

    @property
    def shock_displacement(self) -> float:
        """Ranks gained because of the shock (positive means moved up)."""
        return self.rank_before - self.rank_after

    @property
    def year_displacement(self) -> float:
        """Absolute rank change from the shock year to the following year."""
        return abs(self.following_rank - self.rank_after)


@dataclass(frozen=True)
class ShockExperiment:
    """One journal receiving a single outlier article in a synthetic field.

    ``baseline`` holds the shocked journal's other articles in the shock
    year; the shock article is added to them so the journal publishes
    ``len(baseline) + 1`` articles. The field's first year is the shock year
    and the shocked journal is ``field.journal_ids()[journal_index]``.
    """

    baseline: tuple[int, ...]
    shock_count: int
    field: FieldSpec
    journal_index: int = 0
    name: str = "custom"
    results: Mapping[MeanKind, ShockOutcome] | None = dataclasses.field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "baseline", tuple(int(c) for c in self.baseline))
        if not self.baseline:
            raise ValueError("baseline must be non-empty")
        if any(c < 0 for c in self.baseline) or self.shock_count < 0:
            raise ValueError("counts must be non-negative")
        if self.field.years[1] - self.field.years[0] < 1:
            raise ValueError("field must span at least two years")
        if not 0 <= self.journal_index < self.field.n_journals:
            raise ValueError("journal_index out of range")

    @property
    def journal_id(self) -> str:
        return self.field.journal_ids()[self.journal_index]

    @property
    def shock_year(self) -> int:
        return self.field.years[0]

    @property
    def replacement_count(self) -> int:
        return int(statistics.median_low(self.baseline))

    @property
    def shocked_counts(self) -> tuple[int, ...]:
        return (self.shock_count,) + self.baseline

    @property
    def unshocked_counts(self) -> tuple[int, ...]:
        return (self.replacement_count,) + self.baseline


def _rank_of(corpus: Corpus, spec: FieldSpec, year: int, mean_kind: MeanKind, journal: str):
    table = build_ranking(corpus, spec.subcategory, year, CountSource.CITATIONS, mean_kind)
    for entry in table.entries:
        if entry.journal_id == journal:
            return entry.value, entry.rank
    raise LookupError(f"{journal} missing from {year} ranking")


def run_shock_experiment(exp: ShockExperiment) -> ShockExperiment:
    """Rank the shocked journal with and without its outlier article.

    Returns a copy of ``exp`` with ``results`` filled for both mean kinds.
    """
    counts = generate_counts(exp.field)
    journal, year = exp.journal_id, exp.shock_year

    def corpus_with(shock_year_counts):
        patched = dict(counts)
        patched[(journal, year)] = {"citations": np.asarray(shock_year_counts, dtype=np.int64)}
        return corpus_from_counts(patched, exp.field.subcategory)

    after = corpus_with(exp.shocked_counts)
    before = corpus_with(exp.unshocked_counts)
    results = {}
    for kind in MeanKind:
        v_after, r_after = _rank_of(after, exp.field, year, kind, journal)
        v_before, r_before = _rank_of(before, exp.field, year, kind, journal)
        v_next, r_next = _rank_of(after, exp.field, year + 1, kind, journal)
        results[kind] = ShockOutcome(kind, v_before, v_after, r_before, r_after, v_next, r_next)
    return dataclasses.replace(exp, results=results)



# -- presets -----------------------------------------------------------------


def _low_tail(rng: np.random.Generator, loc: float, size: int, cap: int) -> tuple[int, ...]:
    draws = np.minimum(discretised_lognormal(rng, loc, 1.0, size), cap)
    return tuple(int(v) for v in draws)


def _preset_field(seed, target_loc, n_journals, years, subcategory, rng):
    others = rng.normal(1.6, 0.5, n_journals - 1)
    return FieldSpec(
        n_journals=n_journals,
        years=years,
        articles_per_journal=(10, 60),
        journal_location=(target_loc,) + tuple(float(v) for v in others),
        journal_scale=1.0,
        seed=seed,
        subcategory=subcategory,
    )


def systematics_preset(seed: int = 2005) -> ShockExperiment:
    """Small journal, 10 articles, one at 170 citations and the next at 30,
    in a 20-journal field; the shock year is followed by an ordinary year."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    target_loc = 1.2
    field = _preset_field(seed, target_loc, 20, (2005, 2006), "Insect Science", rng)
    baseline = (30,) + _low_tail(rng, target_loc, 8, cap=30)
    return ShockExperiment(baseline, 170, field, name="systematics")


def fly_preset(seed: int = 2012) -> ShockExperiment:
    """Larger journal, 52 articles, one at 192 citations and the next at 8."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1])))
    target_loc = 1.2
    field = _preset_field(seed, target_loc, 20, (2012, 2013), "Insect Science", rng)
    baseline = (8,) + _low_tail(rng, target_loc, 50, cap=8)
    return ShockExperiment(baseline, 192, field, name="fly")


PRESETS = {"systematics": systematics_preset, "fly": fly_preset}


def stability_benchmark_spec(seed: int = 0) -> FieldSpec:
    """50 journals x 11 years x 30 articles with occasional outlier articles.

    The shock count is 20 times the median count of this field (median 4).
    """
    return FieldSpec(
        n_journals=50,
        years=(2004, 2014),
        articles_per_journal=30,
        location_mean=1.6,
        location_sd=0.5,
        journal_scale=1.0,
        drift=0.1,
        shock_rate=0.05,
        shock_count=80,
        seed=seed,
    )


def compare_stability(spec: FieldSpec, min_articles: int = 0) -> dict[MeanKind, float | None]:
    """Average consecutive-year rho of the arithmetic and geometric rankings."""
    from .stability import StabilityConfig, stability_report

    corpus = generate_corpus(spec)
    return {
        kind: stability_report(
            corpus, spec.subcategory, spec.years, StabilityConfig(CountSource.CITATIONS, kind, min_articles)
        ).average_rho
        for kind in MeanKind
    }
