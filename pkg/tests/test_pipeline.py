from __future__ import annotations

import pytest

from ccgbeam.errors import AlignmentError
from ccgbeam.evaluation import evaluate, load_deps
from ccgbeam.harness import toy_grammar
from ccgbeam.multitagger import PruneConfig, TagDistribution
from ccgbeam.pipeline import ParseSettings, bench, format_bench, format_results, parse_corpus, parse_sentence
from ccgbeam.scoring import ScoreChart


def test_empty_corpus(tables, markedup):
    out = parse_corpus([], tables, markedup)
    assert out.results == [] and out.report.coverage == 0.0
    assert format_results([]) == ""


def test_oracle_inputs_reproduce_gold(oracle, tables, markedup):
    out = parse_corpus(oracle["tags"], tables, markedup, oracle["charts"])
    test = load_deps(format_results(out.results, "both"))
    assert evaluate(oracle["gold"], test).f == 100.0
    assert all(s.derivations for s in test)


def test_workers_do_not_change_output(oracle, tables, markedup):
    one = parse_corpus(oracle["tags"], tables, markedup, oracle["charts"], workers=1)
    two = parse_corpus(oracle["tags"], tables, markedup, oracle["charts"], workers=2)
    for kind in ("deps", "derivs", "both"):
        assert format_results(one.results, kind) == format_results(two.results, kind)


def test_alignment_errors(oracle, tables, markedup):
    with pytest.raises(AlignmentError):
        parse_corpus(oracle["tags"], tables, markedup, oracle["charts"][:-1])
    charts = list(oracle["charts"])
    charts[0] = ScoreChart(n=len(oracle["tags"][0]) + 1)
    with pytest.raises(AlignmentError):
        parse_corpus(oracle["tags"], tables, markedup, charts)
    with pytest.raises(AlignmentError):
        bench(oracle["tags"], oracle["gold"][:-1], tables, markedup, oracle["charts"], beams=(4,))


def test_retry_gammas_recover_a_pruned_tag():
    tables, markedup = toy_grammar()
    dists = [
        TagDistribution.from_probs(0, "John", {"N/N": 0.9996, "NP": 0.0004}),
        TagDistribution.from_probs(1, "slept", {r"S[dcl]\NP": 1.0}),
    ]
    plain = ParseSettings(prune=PruneConfig(0.0005))
    assert parse_sentence(dists, tables, markedup, None, plain).skimmed
    retry = ParseSettings(prune=PruneConfig(0.0005), retry=(0.0001,))
    result = parse_sentence(dists, tables, markedup, None, retry)
    assert not result.skimmed and str(result.derivation.cat) == "S[dcl]"


def test_bench_rows(oracle, tables, markedup):
    rows = bench(oracle["tags"], oracle["gold"], tables, markedup, oracle["charts"], beams=(1, 4, 16))
    assert [r.beam for r in rows] == [1, 4, 16]
    assert rows[-1].f >= rows[0].f
    assert rows[-1].f == 100.0
    text = format_bench(rows)
    assert text.splitlines()[0].split() == ["Beam", "F", "Sents/sec", "%Skimmed"]
    assert len(text.splitlines()) == 4


def test_unknown_output_kind():
    with pytest.raises(ValueError):
        format_results([], "xml")
