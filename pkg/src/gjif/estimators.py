"""scikit-learn compatible wrappers.

``X`` is an article table: a :class:`pandas.DataFrame` (or anything
convertible to one, or a :class:`~gjif.corpus.Corpus`) with the ingestion
columns ``article_id, journal_id, subcategory, year, doc_type, citations``
and optionally ``readers``.
"""

from __future__ import annotations

import math

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import COLUMNS, REQUIRED_COLUMNS, Corpus, CountSource, record_from_mapping
from .metrics import MeanKind
from .ranking import score_field_year
from .report import score_rows
from .stability import DEFAULT_MIN_ARTICLES, StabilityConfig, stability_report


def check_articles(X) -> Corpus:
    """Validate an article table and return it as a :class:`Corpus`.

    Raises ``ValueError`` naming the first offending row; unlike file
    ingestion nothing is skipped here.
    """
    if isinstance(X, Corpus):
        return X
    df = X if isinstance(X, pd.DataFrame) else pd.DataFrame(X)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"missing required columns {missing}")
    cols = [c for c in COLUMNS if c in df.columns]
    records = []
    for i, row in enumerate(df[cols].itertuples(index=False, name=None)):
        mapping = {}
        for key, value in zip(cols, row):
            if isinstance(value, float) and math.isnan(value):
                value = None
            elif isinstance(value, np.generic):
                value = value.item()
            mapping[key] = value
        try:
            records.append(record_from_mapping(mapping))
        except ValueError as exc:
            raise ValueError(f"row {i}: {exc}") from None
    return Corpus(records)


def _check_choice(name, value, allowed):
    if value not in allowed:
        raise ValueError(f"{name} must be one of {sorted(allowed)}, got {value!r}")


class JournalImpactTransformer(TransformerMixin, BaseEstimator):
    """Turn article rows into one row per journal-year with aJIF/gJIF columns.

    Parameters
    ----------
    source : {"citations", "readers", "both"}
    mean_kind : {"arithmetic", "geometric", "both"}
    min_articles : int
        Journal-years with fewer articles are dropped from the output.
    """

    def __init__(self, source="both", mean_kind="both", min_articles=0):
        self.source = source
        self.mean_kind = mean_kind
        self.min_articles = min_articles

    def _variants(self):
        _check_choice("source", self.source, {"citations", "readers", "both"})
        _check_choice("mean_kind", self.mean_kind, {"arithmetic", "geometric", "both"})
        sources = list(CountSource) if self.source == "both" else [CountSource(self.source)]
        kinds = list(MeanKind) if self.mean_kind == "both" else [MeanKind(self.mean_kind)]
        return [(s, k) for s in sources for k in kinds]

    def fit(self, X, y=None):
        corpus = check_articles(X)
        self.variants_ = self._variants()
        self.feature_names_out_ = [f"{s.value}_{k.label.lower()}" for s, k in self.variants_]
        self.subcategories_ = corpus.subcategories()
        return self

    def transform(self, X):
        check_is_fitted(self, "variants_")
        corpus = check_articles(X)
        scores = []
        for sub in corpus.subcategories():
            for year in corpus.years(sub):
                for source, kind in self.variants_:
                    scores.extend(score_field_year(corpus, sub, year, source, kind))
        df = pd.DataFrame(
            score_rows(scores),
            columns=["subcategory", "year", "journal_id", "article_count", *self.feature_names_out_],
        )
        return df[df["article_count"] >= self.min_articles].reset_index(drop=True)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return np.asarray(
            ["subcategory", "year", "journal_id", "article_count", *self.feature_names_out_],
            dtype=object,
        )


class RankStabilityScorer(BaseEstimator):
    """Average consecutive-year Spearman stability per subcategory.

    ``fit`` stores one report per subcategory in ``reports_`` and the
    per-subcategory average correlations in ``stability_``. ``score``
    returns the mean of the defined per-subcategory averages.
    """

    def __init__(self, source="citations", mean_kind="geometric",
                 min_articles=DEFAULT_MIN_ARTICLES, years=None):
        self.source = source
        self.mean_kind = mean_kind
        self.min_articles = min_articles
        self.years = years

    def _reports(self, corpus):
        config = StabilityConfig(self.source, self.mean_kind, self.min_articles)
        reports = {}
        for sub in corpus.subcategories():
            if self.years is not None:
                years = tuple(self.years)
            else:
                ys = corpus.years(sub)
                if len(ys) < 2:
                    continue
                years = (ys[0], ys[-1])
            reports[sub] = stability_report(corpus, sub, years, config)
        return reports

    def fit(self, X, y=None):
        self.reports_ = self._reports(check_articles(X))
        self.stability_ = {sub: r.average_rho for sub, r in self.reports_.items()}
        return self

    def score(self, X, y=None):
        reports = self._reports(check_articles(X))
        values = [r.average_rho for r in reports.values() if r.defined]
        return float(np.mean(values)) if values else float("nan")
