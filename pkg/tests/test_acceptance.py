"""End-to-end acceptance criteria, one test each.

Each test prints a PASS/FAIL line in the terminal summary under
"acceptance criteria".
"""

from __future__ import annotations

import math
import os
import random
import subprocess
import sys
import time
from pathlib import Path

from ccgbeam.chart import (
    DecodeConfig,
    collect_dependencies,
    decode,
    derivation_to_string,
    nodes,
    validate_derivation,
)
from ccgbeam.cli import bundled_path
from ccgbeam.corpus import extract_grammar, gold_oracle, read_treebank
from ccgbeam.evaluation import evaluate, load_deps
from ccgbeam.harness import HashScorer, best_derivation, enumerate_all_derivations, random_sentence, toy_grammar
from ccgbeam.multitagger import PruneConfig, TagDistribution, load_tag_file, prune
from ccgbeam.pipeline import ParseSettings, bench, format_results, parse_corpus, result_to_sentence
from ccgbeam.propagation import Dependency
from ccgbeam.scoring import FrequencyScorer, ScoreConfig, load_score_charts, score_derivation


def test_oracle_round_trip(acceptance):
    start = time.perf_counter()
    mini = bundled_path("mini.tb")
    entries = read_treebank(mini)
    tables = extract_grammar(entries)
    from ccgbeam.markedup import read_markedup

    markedup = read_markedup(bundled_path("markedup.txt"))
    files = gold_oracle(entries, markedup)
    out = parse_corpus(load_tag_file(files.tags), tables, markedup, load_score_charts(files.spans))
    test = load_deps(format_results(out.results))
    unlicensed = [i for i, res in enumerate(out.results) if validate_derivation(res.derivation, tables)]
    r = evaluate(load_deps(files.deps), test)
    seconds = time.perf_counter() - start
    scores = (r.f, r.category_accuracy, r.sentence_accuracy, r.coverage)
    ok = len(entries) >= 25 and not files.skipped and not unlicensed and scores == (100.0,) * 4 and seconds < 10
    acceptance("1 oracle round-trip", ok,
               f"{len(entries)} sentences, F/Cat/Sent/Cov = {'/'.join(f'{s:.1f}' for s in scores)}, {seconds:.2f}s")


def test_object_relative_long_range_dependency(acceptance, by_id, tables, markedup):
    entry = by_id["object-relative"]
    tags = [[(leaf.cat, 0.0)] for leaf in entry.tree.leaves()]
    result = decode(list(entry.tokens), tags, tables, markedup)
    expected = Dependency(entry.tokens.index("reached"), r"(S[dcl]\NP)/NP", 2,
                          entry.tokens.index("agreement"), True)
    long_range = [d for d in result.dependencies if d.long_range]
    ok = not result.skimmed and long_range == [expected]
    acceptance("2 object-relative long-range dependency", ok, f"long-range deps {long_range}")


def test_beam_matches_brute_force(acceptance):
    tables, markedup = toy_grammar()
    rng = random.Random(2024)
    checked = mismatches = 0
    lengths = set()
    for i in range(200):
        tokens, tags = random_sentence(rng, max_len=8, distractors=2)
        scorer = HashScorer(i)
        best = best_derivation(enumerate_all_derivations(tokens, tags, tables, markedup, scorer))
        result = decode(tokens, tags, tables, markedup, scorer, DecodeConfig(beam=10**9))
        checked += 1
        lengths.add(len(tokens))
        same = (
            best is not None
            and not result.skimmed
            and abs(result.score - best.score) <= 1e-9
            and sorted(result.dependencies) == sorted(collect_dependencies(best))
            and validate_derivation(result.derivation, tables) == []
        )
        mismatches += not same
    ok = checked >= 200 and mismatches == 0 and max(lengths) <= 8
    acceptance("3 beam/brute-force equivalence", ok, f"{checked} sentences, {mismatches} mismatches")


def _dirichlet(rng: random.Random, k: int, concentration: float) -> list:
    draws = [rng.gammavariate(concentration, 1.0) + 1e-300 for _ in range(k)]
    total = sum(draws)
    return [d / total for d in draws]


def test_multitagger_monotone_in_gamma(acceptance):
    rng = random.Random(7)
    categories = [f"C{i}" for i in range(40)]
    dists, gold = [], []
    while len(dists) < 10_000:
        probs = _dirichlet(rng, len(categories), 0.1)
        probs = [max(p, 1e-12) for p in probs]
        total = sum(probs)
        probs = [p / total for p in probs]
        dists.append(TagDistribution(len(dists), "w", tuple(zip(categories, map(math.log, probs)))))
        gold.append(rng.choices(categories, probs)[0])
    grid = [10 ** -e for e in (6, 5, 4, 3.3, 3, 2.5, 2, 1.5, 1, 0.5)]
    failures = []
    for mode in ("absolute", "relative"):
        kept = [[{c for c, _ in prune(d, PruneConfig(g, 10, mode))} for d in dists] for g in grid]
        curve = []
        for sets in kept:
            size = sum(map(len, sets)) / len(sets)
            acc = sum(g in s for g, s in zip(gold, sets)) / len(sets)
            curve.append((acc, size))
        for a in range(len(grid)):
            for b in range(a + 1, len(grid)):
                if not all(tight <= loose for tight, loose in zip(kept[b], kept[a])):
                    failures.append(f"{mode}: sets not nested for {grid[a]:g} < {grid[b]:g}")
                if curve[b][0] > curve[a][0] or curve[b][1] > curve[a][1]:
                    failures.append(f"{mode}: not monotone for {grid[a]:g} < {grid[b]:g}")
    ok = not failures and len(dists) == 10_000
    acceptance("4 multitagger nesting and monotonicity", ok,
               "; ".join(failures[:3]) or f"10000 tokens, {len(grid)}-point grid, both modes")


def test_skimmer_covers_corrupted_sentences(acceptance, oracle, tables, markedup):
    tags = [list(s) for s in oracle["tags"]]
    corrupted = set(range(0, len(tags), 5))
    for i in corrupted:
        tags[i] = [TagDistribution(d.index, d.word, (("PP/PP", 0.0),)) for d in tags[i]]
    out = parse_corpus(tags, tables, markedup, oracle["charts"])
    problems = []
    for i, r in enumerate(out.results):
        n = len(tags[i])
        spans = [(f.start, f.end) for f in r.fragments]
        if [s for s, _ in spans] != [0] + [e for _, e in spans[:-1]] or spans[-1][1] != n:
            problems.append(f"sentence {i}: fragments {spans} do not tile [0,{n})")
        if i in corrupted and n > 1 and not r.skimmed:
            problems.append(f"sentence {i}: corrupted but not skimmed")
        if i not in corrupted and r.skimmed:
            problems.append(f"sentence {i}: skimmed without corruption")
    test = [result_to_sentence(r) for r in out.results]
    coverage = evaluate(oracle["gold"], test).coverage
    share = len(corrupted) / len(tags)
    ok = not problems and coverage == 100.0 and share >= 0.2
    acceptance("5 skimmer totality and coverage", ok,
               "; ".join(problems[:3]) or f"{len(corrupted)}/{len(tags)} corrupted, coverage {coverage:.1f}")


def test_score_additivity_and_weight_scaling(acceptance, oracle, tables, markedup):
    worst = 0.0
    differ = []
    checked = 0
    for i, (dists, chart) in enumerate(zip(oracle["tags"], oracle["charts"])):
        tokens = [d.word for d in dists]
        tag_sets = [list(d.entries) for d in dists]
        for scorer in (chart, FrequencyScorer(tables)):
            for cfg in (ScoreConfig(), ScoreConfig(0.3, 2.0)):
                base = decode(tokens, tag_sets, tables, markedup, scorer, score_cfg=cfg)
                scaled = decode(tokens, tag_sets, tables, markedup, scorer,
                                score_cfg=ScoreConfig(7 * cfg.w_st, 7 * cfg.w_sp))
                for item in base.fragments:
                    for node in nodes(item):
                        worst = max(worst, abs(node.score - score_derivation(node, scorer, cfg)))
                        checked += 1
                same = [derivation_to_string(f) for f in base.fragments] == [
                    derivation_to_string(f) for f in scaled.fragments
                ] and sorted(base.dependencies) == sorted(scaled.dependencies)
                if not same:
                    differ.append(i)
    ok = worst <= 1e-9 and not differ and checked > 0
    acceptance("6 score additivity and weight scaling", ok,
               f"{checked} subderivations, max drift {worst:.2e}, {len(differ)} changed under x7")


def test_bench_report_shape(acceptance, oracle, tables, markedup):
    beams = (4, 8, 16, 32, 64)
    rows = bench(oracle["tags"], oracle["gold"], tables, markedup, oracle["charts"], beams, ParseSettings())
    ok = [r.beam for r in rows] == list(beams) and rows[-1].f >= rows[0].f
    ok = ok and all(0 <= r.f <= 100 and r.sentences_per_second > 0 and 0 <= r.percent_skimmed <= 100 for r in rows)
    acceptance("7 bench report shape", ok, ", ".join(f"beam {r.beam}: F {r.f:.1f}" for r in rows))


def _pipeline(workdir: Path, hash_seed: str, workers: str) -> dict:
    env = dict(os.environ, PYTHONHASHSEED=hash_seed)

    def ccgbeam(*args):
        subprocess.run([sys.executable, "-m", "ccgbeam", *args], check=True, env=env,
                       capture_output=True, cwd=workdir)

    ccgbeam("extract-grammar", "--treebank", str(bundled_path("mini.tb")), "--out", "grammar")
    ccgbeam("oracle", "--treebank", str(bundled_path("mini.tb")), "--grammar", "grammar", "--out", "oracle")
    ccgbeam("parse", "--grammar", "grammar", "--tags", "oracle/tags.txt", "--spans", "oracle/spans.txt",
            "--workers", workers, "--output", "both", "--out", "test.deps")
    ccgbeam("evaluate", "--gold", "oracle/gold.deps", "--test", "test.deps", "--per-relation",
            "--markedup", "grammar/markedup.txt", "--out", "report.txt")
    return {
        str(p.relative_to(workdir)): p.read_bytes() for p in sorted(workdir.rglob("*")) if p.is_file()
    }


def test_end_to_end_determinism(acceptance, tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first = _pipeline(tmp_path / "a", "1", "1")
    second = _pipeline(tmp_path / "b", "4242", "3")
    differing = sorted(k for k in first.keys() | second.keys() if first.get(k) != second.get(k))
    ok = bool(first) and not differing
    acceptance("8 determinism", ok, f"{len(first)} files compared" + (f", differ: {differing}" if differing else ""))
