"""Corpus-level parsing with optional worker processes, and the beam benchmark."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .chart import DecodeConfig, ParseResult, decode, derivation_to_string
from .errors import AlignmentError
from .evaluation import SentenceDeps, evaluate, format_sentence
from .multitagger import PruneConfig, prune
from .scoring import ScoreConfig


@dataclass(frozen=True)
class ParseSettings:
    decode: DecodeConfig = DecodeConfig()
    score: ScoreConfig = ScoreConfig()
    prune: PruneConfig = PruneConfig()
    # further gammas tried, in order, while the parse comes back skimmed
    retry: tuple = ()


@dataclass
class CorpusReport:
    sentences: int = 0
    skimmed: int = 0
    analysed: int = 0
    seconds: float = 0.0

    @property
    def sentences_per_second(self) -> float:
        return self.sentences / self.seconds if self.seconds > 0 else 0.0

    @property
    def percent_skimmed(self) -> float:
        return 100.0 * self.skimmed / self.sentences if self.sentences else 0.0

    @property
    def coverage(self) -> float:
        return 100.0 * self.analysed / self.sentences if self.sentences else 0.0


@dataclass
class CorpusResult:
    results: list = field(default_factory=list)
    report: CorpusReport = field(default_factory=CorpusReport)


def parse_sentence(dists, tables, markedup, chart, settings: ParseSettings) -> ParseResult:
    tokens = [d.word for d in dists]
    gammas = (settings.prune.gamma, *settings.retry)
    result = None
    for gamma in gammas:
        cfg = replace(settings.prune, gamma=gamma)
        tag_sets = [prune(d, cfg) for d in dists]
        result = decode(tokens, tag_sets, tables, markedup, chart, settings.decode, settings.score)
        if not result.skimmed:
            break
    return result


_SHARED: dict = {}


def _init_worker(tables, markedup, settings) -> None:
    _SHARED.update(tables=tables, markedup=markedup, settings=settings)


def _parse_job(job):
    dists, chart = job
    return parse_sentence(dists, _SHARED["tables"], _SHARED["markedup"], chart, _SHARED["settings"])


def parse_corpus(sentences, tables, markedup, charts=None, settings: ParseSettings = ParseSettings(),
                 workers: int = 1) -> CorpusResult:
    """Parse every sentence; results come back in input order regardless of ``workers``."""
    if charts is not None and len(charts) != len(sentences):
        raise AlignmentError(f"{len(sentences)} tagged sentences but {len(charts)} score charts")
    if charts is not None:
        for i, (dists, chart) in enumerate(zip(sentences, charts)):
            if chart.n not in (None, 0) and chart.n != len(dists):
                raise AlignmentError(f"sentence {i + 1}: {len(dists)} tokens, score chart for {chart.n}")
    jobs = list(zip(sentences, charts if charts is not None else [None] * len(sentences)))
    start = time.perf_counter()
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        results = [parse_sentence(d, tables, markedup, c, settings) for d, c in jobs]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(tables, markedup, settings)) as pool:
            chunk = max(1, len(jobs) // (workers * 4))
            results = list(pool.map(_parse_job, jobs, chunksize=chunk))
    seconds = time.perf_counter() - start
    report = CorpusReport(len(results), sum(r.skimmed for r in results), len(results), seconds)
    return CorpusResult(results, report)


def default_workers() -> int:
    return os.cpu_count() or 1


def result_to_sentence(result: ParseResult, derivations: bool = False) -> SentenceDeps:
    trees = [derivation_to_string(f) for f in result.fragments] if derivations else []
    return SentenceDeps(result.dependencies, result.categories, result.skimmed, derivations=trees)


def format_results(results, output: str = "deps") -> str:
    """Render parse results as a dependency file, derivations, or both."""
    if output == "derivs":
        blocks = []
        for r in results:
            lines = (["# skimmed"] if r.skimmed else []) + [derivation_to_string(f) for f in r.fragments]
            blocks.append("".join(line + "\n" for line in lines))
        return "\n".join(blocks)
    if output not in ("deps", "both"):
        raise ValueError(f"unknown output kind {output!r}")
    blocks = []
    for r in results:
        s = result_to_sentence(r, derivations=output == "both")
        blocks.append(format_sentence(s.deps, s.categories, s.skimmed, s.derivations))
    return "\n".join(blocks)


@dataclass
class BenchRow:
    beam: int
    f: float
    sentences_per_second: float
    percent_skimmed: float


def bench(sentences, gold, tables, markedup, charts=None, beams=(4, 8, 16, 32, 64),
          settings: ParseSettings = ParseSettings(), workers: int = 1) -> list[BenchRow]:
    """Parse the corpus once per beam width and score it against ``gold``."""
    if len(gold) != len(sentences):
        raise AlignmentError(f"{len(sentences)} tagged sentences but {len(gold)} gold sentences")
    rows = []
    for beam in beams:
        cfg = replace(settings, decode=replace(settings.decode, beam=beam))
        out = parse_corpus(sentences, tables, markedup, charts, cfg, workers)
        test = [result_to_sentence(r) for r in out.results]
        f = evaluate(gold, test).f if sentences else 0.0
        rows.append(BenchRow(beam, f, out.report.sentences_per_second, out.report.percent_skimmed))
    return rows


def format_bench(rows) -> str:
    lines = [f"{'Beam':>5} {'F':>7} {'Sents/sec':>10} {'%Skimmed':>9}"]
    for r in rows:
        lines.append(f"{r.beam:>5} {r.f:7.1f} {r.sentences_per_second:10.1f} {r.percent_skimmed:9.1f}")
    return "\n".join(lines) + "\n"
