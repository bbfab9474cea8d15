"""Command-line entry point: ``gjif <command> [options]``.

Exit status: 0 success, 2 usage error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .corpus import Corpus, CorpusError, CorpusIOError, CountSource, ingest_corpus, write_corpus
from .metrics import MeanKind
from .ranking import build_ranking, score_field_year
from .report import (
    ReportIOError,
    atomic_write,
    build_stability_table,
    ranking_rows,
    render,
    score_rows,
)
from .stability import DEFAULT_MIN_ARTICLES, StabilityConfig, stability_report
from .synth import (
    PRESETS,
    RNG_ALGORITHM,
    FieldSpec,
    FieldSpecError,
    dump_field_spec,
    generate_corpus,
    read_field_spec,
    run_shock_experiment,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4

COMMANDS = ("ingest", "compute", "rank", "stability", "table", "synth", "shock")

log = logging.getLogger("gjif")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def parse_years(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        years = (int(a), int(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    if years[1] < years[0]:
        raise argparse.ArgumentTypeError(f"empty year range {text!r}")
    return years


def _means(choice: str) -> list[MeanKind]:
    return list(MeanKind) if choice == "both" else [MeanKind(choice)]


def _sources(choice: str) -> list[CountSource]:
    return list(CountSource) if choice == "both" else [CountSource(choice)]


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def resolved_config(args: argparse.Namespace) -> dict:
    """Every option that can influence the primary output, in a fixed order."""
    keys = ("command", "input", "format", "source", "mean", "min_articles", "years",
            "seed", "preset", "config", "subcategory", "category")
    out = {"tool": f"gjif {__version__}"}
    for key in keys:
        value = getattr(args, key, None)
        if value is None:
            continue
        if isinstance(value, tuple) and key == "years":
            value = f"{value[0]}:{value[1]}"
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def _load(args) -> Corpus:
    if not args.input:
        raise UsageError(f"{args.command}: --input is required")
    corpus, summary = ingest_corpus(args.input, args.input_format)
    for rej in summary.rejected:
        log.warning("%s: line %d rejected: %s", args.input, rej.line, rej.reason)
    args._counts = {"input_rows": summary.total_rows, "accepted": summary.accepted,
                    "rejected": summary.rejected_count}
    return corpus


def _subcategories(args, corpus: Corpus) -> list[str]:
    subs = args.subcategory or corpus.subcategories()
    if not subs:
        raise DataError(f"{args.input}: corpus has no records")
    return subs


# -- commands ---------------------------------------------------------------


def cmd_ingest(args):
    corpus, summary = ingest_corpus(args.input, args.input_format) if args.input else (None, None)
    if summary is None:
        raise UsageError("ingest: --input is required")
    args._counts = {"input_rows": summary.total_rows, "accepted": summary.accepted,
                    "rejected": summary.rejected_count}
    rows = [{"line": r.line, "reason": r.reason} for r in summary.rejected]
    if args.format == "json":
        return {
            "path": summary.path,
            "total_rows": summary.total_rows,
            "accepted": summary.accepted,
            "rejected": summary.rejected_count,
            "reasons": summary.reasons(),
            "ignored_columns": list(summary.ignored_columns),
            "rejected_rows": rows,
            "subcategories": corpus.subcategories(),
            "journals": len(corpus.journals()),
        }
    return [{"line": "total", "reason": f"{summary.accepted} accepted, {summary.rejected_count} rejected"}] + rows


def cmd_compute(args):
    corpus = _load(args)
    scores = []
    for sub in _subcategories(args, corpus):
        for year in corpus.years(sub):
            for source in _sources(args.source):
                for kind in _means(args.mean):
                    scores.extend(score_field_year(corpus, sub, year, source, kind))
    return score_rows(scores)


def cmd_rank(args):
    corpus = _load(args)
    tables = []
    for sub in _subcategories(args, corpus):
        for year in corpus.years(sub):
            for source in _sources(args.source):
                for kind in _means(args.mean):
                    tables.append(build_ranking(corpus, sub, year, source, kind, args.min_articles))
    return ranking_rows(tables)


def cmd_stability(args):
    corpus = _load(args)
    reports = []
    for sub in _subcategories(args, corpus):
        for source in _sources(args.source):
            for kind in _means(args.mean):
                config = StabilityConfig(source, kind, args.min_articles)
                reports.append(stability_report(corpus, sub, args.years, config))
    return reports[0] if len(reports) == 1 else reports


def cmd_table(args):
    corpus = _load(args)
    subs = _subcategories(args, corpus)
    return build_stability_table(corpus, args.category or "all", subs, args.years, args.min_articles)


def _field_spec(args) -> FieldSpec:
    spec = read_field_spec(args.config) if args.config else FieldSpec()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.years_given:
        changes["years"] = args.years
    return spec.replace(**changes) if changes else spec


def cmd_synth(args):
    if not args.output:
        raise UsageError("synth: --output is required")
    spec = _field_spec(args)
    args._field_spec = dump_field_spec(spec)
    corpus = generate_corpus(spec)
    args._counts = {"records": len(corpus)}
    fmt = "jsonl" if Path(args.output).suffix.lower() in (".jsonl", ".ndjson") else "csv"
    tmp = Path(args.output).with_name(f".{Path(args.output).name}.tmp")
    write_corpus(corpus, tmp, fmt)
    tmp.replace(args.output)
    return None


def cmd_shock(args):
    if not args.preset:
        raise UsageError(f"shock: --preset is required (one of {sorted(PRESETS)})")
    if args.preset not in PRESETS:
        raise UsageError(f"shock: unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
    factory = PRESETS[args.preset]
    exp = factory() if args.seed is None else factory(args.seed)
    args._field_spec = dump_field_spec(exp.field)
    exp = run_shock_experiment(exp)
    rows = []
    for kind, res in exp.results.items():
        rows.append({
            "preset": exp.name,
            "journal_id": exp.journal_id,
            "mean_kind": kind.value,
            "articles": len(exp.shocked_counts),
            "shock_count": exp.shock_count,
            "value_before": res.value_before,
            "value_after": res.value_after,
            "delta": res.delta,
            "rank_before": res.rank_before,
            "rank_after": res.rank_after,
            "following_rank": res.following_rank,
            "shock_displacement": res.shock_displacement,
            "year_displacement": res.year_displacement,
        })
    return rows


HANDLERS = {
    "ingest": cmd_ingest,
    "compute": cmd_compute,
    "rank": cmd_rank,
    "stability": cmd_stability,
    "table": cmd_table,
    "synth": cmd_synth,
    "shock": cmd_shock,
}


# -- plumbing ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="article file (.csv or .jsonl)")
    common.add_argument("--input-format", choices=["csv", "jsonl"], help="override suffix detection")
    common.add_argument("--output", help="output file; stdout when omitted")
    common.add_argument("--format", choices=["csv", "json", "md"], default=None)
    common.add_argument("--source", choices=["citations", "readers", "both"], default=None)
    common.add_argument("--mean", choices=["arithmetic", "geometric", "both"], default="both")
    common.add_argument("--min-articles", type=int, default=DEFAULT_MIN_ARTICLES, metavar="N")
    common.add_argument("--years", type=parse_years, default=None, metavar="A:B")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--preset", default=None)
    common.add_argument("--config", help="synthetic field file (key = value lines)")
    common.add_argument("--subcategory", action="append", help="restrict to a subcategory; repeatable")
    common.add_argument("--category", help="label for the table command")
    common.add_argument("--no-manifest", action="store_true", help="skip the run manifest")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="gjif", description="Arithmetic and geometric journal impact indicators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "ingest": "validate an article file and summarise rejects",
        "compute": "aJIF and gJIF for every journal-year",
        "rank": "journal rankings per subcategory-year",
        "stability": "consecutive-year Spearman stability reports",
        "table": "eight-column stability table per subcategory",
        "synth": "generate a seeded synthetic corpus",
        "shock": "run a single-article shock preset",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _finalise_args(args):
    if args.format is None:
        suffix = Path(args.output).suffix.lower().lstrip(".") if args.output else ""
        args.format = {"markdown": "md"}.get(suffix, suffix) if suffix in ("csv", "json", "md", "markdown") else "csv"
    if args.source is None:
        args.source = "both" if args.command == "compute" else "citations"
    args.years_given = args.years is not None
    if args.years is None:
        args.years = (2004, 2014)
    if args.min_articles < 0:
        raise UsageError("--min-articles must be non-negative")


def write_manifest(args, config: dict, output: Path) -> None:
    inputs = {}
    for key in ("input", "config"):
        path = getattr(args, key, None)
        if path:
            inputs[path] = _digest(Path(path))
    manifest = {
        "config": config,
        "rng": RNG_ALGORITHM,
        "inputs": inputs,
        "counts": getattr(args, "_counts", {}),
        "output": {str(output): _digest(output)},
        "field_spec": getattr(args, "_field_spec", None),
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    atomic_write(str(output) + ".manifest.json", json.dumps(manifest, indent=2) + "\n")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        _finalise_args(args)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(message)s",
        )
        config = resolved_config(args)
        result = HANDLERS[args.command](args)
        if result is not None:
            if isinstance(result, dict):
                text = json.dumps({**result, "run_config": config}, indent=2) + "\n"
            else:
                text = render(result, args.format, config)
            if args.output:
                atomic_write(args.output, text)
            else:
                sys.stdout.write(text)
        if args.output and not args.no_manifest:
            write_manifest(args, config, Path(args.output))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorpusError, FieldSpecError, DataError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ReportIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
