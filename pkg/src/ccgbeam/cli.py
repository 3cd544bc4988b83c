"""Command-line entry point: extract-grammar, oracle, parse, evaluate, prune-tags, bench."""

from __future__ import annotations

import argparse
import shutil
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .chart import DecodeConfig
from .corpus import extract_grammar, gold_oracle, read_treebank
from .errors import AlignmentError, CCGError, FormatError
from .evaluation import evaluate, read_deps
from .grammar import GRAMMAR_FORMAT_VERSION, read_tables, write_tables
from .markedup import MarkedupTable, read_markedup
from .multitagger import (
    ABSOLUTE,
    RELATIVE,
    PruneConfig,
    TagDistribution,
    ambiguity_and_accuracy,
    load_tag_file,
    prune,
    read_tag_file,
    write_tag_file,
)
from .pipeline import ParseSettings, bench, default_workers, format_bench, format_results, parse_corpus
from .scoring import ScoreConfig, read_score_charts

EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_ALIGNMENT = 3
EXIT_INTERNAL = 4
EXIT_IO = 5

MARKEDUP_FILE = "markedup.txt"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("ccgbeam") / "data" / name))


def load_grammar(directory: str | Path) -> tuple:
    """Rule tables and markedup entries from a grammar directory.

    The directory's own ``markedup.txt`` is used when present, otherwise the
    bundled one.
    """
    directory = Path(directory)
    tables = read_tables(directory)
    path = directory / MARKEDUP_FILE
    if not path.exists():
        path = bundled_path(MARKEDUP_FILE)
    return tables, read_markedup(path, tables.registry)


def _require(*paths) -> None:
    for p in paths:
        if p is not None and p != "-" and not Path(p).exists():
            raise FileNotFoundError(f"no such file or directory: {p}")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _markedup(path: str | None) -> MarkedupTable:
    return read_markedup(path or bundled_path(MARKEDUP_FILE))


def _prune_config(args) -> PruneConfig:
    try:
        return PruneConfig(args.gamma, args.alpha, args.gamma_mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _tags(path: str):
    if path == "-":
        return load_tag_file(sys.stdin.read(), source="<stdin>")
    return read_tag_file(path)


def cmd_extract(args) -> int:
    _require(args.treebank, args.markedup)
    if args.min_count < 1:
        raise UsageError("--min-count must be >= 1")
    problems: list = []
    entries = read_treebank(args.treebank, lenient=args.lenient, problems=problems)
    for p in problems:
        print(f"skipped: {p}", file=sys.stderr)
    tables = extract_grammar(entries, args.min_count)
    out = Path(args.out)
    write_tables(tables, out)
    shutil.copyfile(args.markedup or bundled_path(MARKEDUP_FILE), out / MARKEDUP_FILE)
    print(
        f"{len(entries)} trees, {len(tables.category_counts)} lexical categories, "
        f"{sum(len(b) for b in tables.binary.values())} binary and "
        f"{sum(len(b) for b in tables.unary.values())} unary rule instances",
        file=sys.stderr,
    )
    return 0


def cmd_oracle(args) -> int:
    _require(args.treebank, args.grammar, args.markedup)
    entries = read_treebank(args.treebank)
    if args.grammar:
        tables, markedup = load_grammar(args.grammar)
        registry = tables.registry
    else:
        markedup = _markedup(args.markedup)
        registry = markedup.registry
    files = gold_oracle(entries, markedup, registry)
    for ident, reason in files.skipped:
        print(f"skipped entry {ident}: {reason}", file=sys.stderr)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tags.txt").write_text(files.tags)
    (out / "spans.txt").write_text(files.spans)
    (out / "gold.deps").write_text(files.deps)
    return 0


def _settings(args) -> ParseSettings:
    try:
        decode = DecodeConfig(beam=args.beam, max_items=args.max_chart, any_root=args.any_root)
        score = ScoreConfig(args.w_st, args.w_sp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        retry = tuple(float(g) for g in args.retry_gammas.split(",")) if args.retry_gammas else ()
    except ValueError:
        raise UsageError(f"bad --retry-gammas list {args.retry_gammas!r}") from None
    return ParseSettings(decode, score, _prune_config(args), retry)


def _workers(args) -> int:
    if args.workers is None:
        return default_workers()
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    return args.workers


def _load_inputs(args):
    _require(args.grammar, args.tags, args.spans)
    tables, markedup = load_grammar(args.grammar)
    sentences = _tags(args.tags)
    charts = read_score_charts(args.spans, tables.registry) if args.spans else None
    return tables, markedup, sentences, charts


def cmd_parse(args) -> int:
    settings = _settings(args)
    workers = _workers(args)
    tables, markedup, sentences, charts = _load_inputs(args)
    result = parse_corpus(sentences, tables, markedup, charts, settings, workers)
    _emit(format_results(result.results, args.output), args.out)
    r = result.report
    print(f"parsed {r.sentences} sentences, {r.skimmed} skimmed", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    _require(args.gold, args.test, args.markedup)
    gold = read_deps(args.gold)
    test = read_deps(args.test)
    markedup = read_markedup(args.markedup) if args.markedup else None
    report = evaluate(gold, test, markedup)
    _emit(report.to_text(args.per_relation), args.out)
    return 0


def cmd_prune(args) -> int:
    _require(args.tags, args.gold)
    cfg = _prune_config(args)
    sentences = _tags(args.tags)
    pruned = [
        [TagDistribution(d.index, d.word, tuple(prune(d, cfg))) for d in dists] for dists in sentences
    ]
    _emit(write_tag_file(pruned), args.out)
    if args.gold:
        gold = [s.categories or [] for s in read_deps(args.gold)]
        ambiguity, accuracy = ambiguity_and_accuracy(sentences, gold, cfg)
        print(f"categories/word {ambiguity:.3f}  accuracy {100 * accuracy:.2f}", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    settings = _settings(args)
    workers = _workers(args)
    try:
        beams = [int(b) for b in args.beams.split(",")]
    except ValueError:
        raise UsageError(f"bad --beams list {args.beams!r}") from None
    _require(args.gold)
    tables, markedup, sentences, charts = _load_inputs(args)
    gold = read_deps(args.gold)
    rows = bench(sentences, gold, tables, markedup, charts, beams, settings, workers)
    _emit(format_bench(rows), args.out)
    return 0


def _decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grammar", required=True, help="grammar directory from extract-grammar")
    p.add_argument("--tags", required=True, help="tag distribution file ('-' for stdin)")
    p.add_argument("--spans", help="span score chart file")
    p.add_argument("--beam", type=int, default=32)
    p.add_argument("--gamma", type=float, default=0.0005)
    p.add_argument("--alpha", type=int, default=10)
    p.add_argument("--gamma-mode", choices=(ABSOLUTE, RELATIVE), default=ABSOLUTE)
    p.add_argument("--retry-gammas", help="comma-separated gammas tried in turn when a parse is skimmed")
    p.add_argument("--w-st", type=float, default=1.0, help="weight of supertag log-probabilities")
    p.add_argument("--w-sp", type=float, default=1.0, help="weight of span label scores")
    p.add_argument("--max-chart", type=int, default=1_000_000, help="chart items before skimming")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--any-root", action="store_true", help="accept any spanning category as root")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccgbeam", description="Grammar-constrained CCG parsing with beam search.")
    parser.add_argument(
        "--version", action="version",
        version=f"ccgbeam {__version__} (grammar format {GRAMMAR_FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract-grammar", help="build rule tables from a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True, help="grammar directory to write")
    p.add_argument("--markedup", help="markedup file copied into the grammar (default: bundled)")
    p.add_argument("--min-count", type=int, default=1, help="drop rarer lexical categories")
    p.add_argument("--lenient", action="store_true", help="skip malformed trees instead of failing")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("oracle", help="write gold tags, span scores and dependencies")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True, help="directory for tags.txt, spans.txt, gold.deps")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--grammar")
    group.add_argument("--markedup")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("parse", help="parse tagged sentences")
    _decode_flags(p)
    p.add_argument("--output", choices=("deps", "derivs", "both"), default="deps")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("evaluate", help="score parser output against gold dependencies")
    p.add_argument("--gold", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--per-relation", action="store_true")
    p.add_argument("--markedup", help="markedup file supplying relation names")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("prune-tags", help="apply the gamma/alpha multitagger cut")
    p.add_argument("--tags", required=True)
    p.add_argument("--gamma", type=float, default=0.0005)
    p.add_argument("--alpha", type=int, default=10)
    p.add_argument("--gamma-mode", choices=(ABSOLUTE, RELATIVE), default=ABSOLUTE)
    p.add_argument("--gold", help="gold dependency file; reports ambiguity and accuracy")
    p.add_argument("--out")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("bench", help="F and speed across beam widths")
    _decode_flags(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--beams", default="4,8,16,32,64")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ccgbeam: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"ccgbeam: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except AlignmentError as exc:
        print(f"ccgbeam: alignment error: {exc}", file=sys.stderr)
        return EXIT_ALIGNMENT
    except OSError as exc:
        print(f"ccgbeam: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # anything else is a bug or a violated engine invariant
        kind = "engine" if isinstance(exc, CCGError) else type(exc).__name__
        print(f"ccgbeam: internal error ({kind}): {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
