from __future__ import annotations

import re

import pytest

from ccgbeam.corpus import (
    extract_grammar,
    gold_oracle,
    load_treebank,
    parse_tree,
    replay,
    scored_labels,
    write_treebank,
)
from ccgbeam.errors import CCGError, FormatError
from ccgbeam.grammar import RuleKind
from ccgbeam.scoring import load_score_charts

# Golden values, counted once from the bundled treebank text with plain regexes
# (see test_golden_counts_match_regex_count) rather than with the tree reader.
MINI_SENTENCES = 28
MINI_LEXICAL_TYPES = 30
MINI_BINARY_NODES = 99
MINI_UNARY_NODES = 23
MINI_TOKENS = 127


def test_golden_counts_match_regex_count(mini_path):
    text = mini_path.read_text()
    assert len(set(re.findall(r"\(<L (\S+) ", text))) == MINI_LEXICAL_TYPES
    rules = re.findall(r"\(<T \S+ (\S+?)> ", text)
    assert sum(r in (">T", "<T", "TC") for r in rules) == MINI_UNARY_NODES
    assert len(rules) - MINI_UNARY_NODES == MINI_BINARY_NODES
    assert len(re.findall(r"\(<L ", text)) == MINI_TOKENS


def test_mini_treebank_parses(entries, by_id):
    assert len(entries) == MINI_SENTENCES >= 25
    assert sum(len(e.tokens) for e in entries) == MINI_TOKENS
    assert by_id["application-only"].tokens == ("Investors", "appealed", "to", "the", "Exchange", "Commission")
    assert by_id["object-relative"].tokens == ("the", "agreement", "which", "the", "fund", "reached")


def test_single_leaf():
    entries = load_treebank("(<L NP it 0>)\n")
    assert len(entries) == 1 and entries[0].tokens == ("it",)
    assert entries[0].tree.is_leaf


def test_round_trip(entries):
    again = load_treebank(write_treebank(entries))
    assert again == entries


@pytest.mark.parametrize(
    "line",
    [
        "(<T NP >> (<L NP/N the 0>) (<L N dog 1>)",  # missing bracket
        "(<T NP >> (<L NP/N the 0>) (<L N dog 2>))",  # index gap
        "(<T NP >> (<L NP/N the 0>) (<L Q dog 1>))",  # unknown atom
        "(<T NP ?? (<L NP/N the 0>) (<L N dog 1>))",
        "(<T NP >T> (<L NP/N the 0>) (<L N dog 1>))",  # unary symbol with two children
        "(<L NP it 0>) extra",
    ],
)
def test_malformed_trees(line):
    with pytest.raises(FormatError) as info:
        load_treebank("# id ok\n(<L NP it 0>)\n" + line + "\n", source="t.tb")
    assert info.value.line == 3


def test_lenient_skips_bad_lines():
    problems = []
    text = "(<L NP it 0>)\n(<T NP >> (<L NP/N the 0>)\n(<L NP he 0>)\n"
    entries = load_treebank(text, lenient=True, problems=problems)
    assert [e.tokens for e in entries] == [("it",), ("he",)]
    assert len(problems) == 1 and problems[0].line == 2


def test_extract_counts(entries, tables):
    assert len(tables.category_counts) == MINI_LEXICAL_TYPES
    assert tables.binary_count == MINI_BINARY_NODES
    assert tables.unary_count == MINI_UNARY_NODES
    assert sum(tables.category_counts.values()) == MINI_TOKENS
    assert sum(tables.roots.values()) == MINI_SENTENCES
    assert extract_grammar(entries).binary == tables.binary  # deterministic


def test_extract_single_application():
    tables = extract_grammar(load_treebank("(<T NP >> (<L NP/N the 0>) (<L N dog 1>))\n"))
    assert tables.binary == {("NP/N", "N"): {("NP", RuleKind.FA): 1}}
    assert tables.unary == {}


def test_extract_type_raising(by_id):
    tables = extract_grammar([by_id["object-relative"]])
    assert tables.unary == {"NP": {(r"S/(S\NP)", RuleKind.TR): 1}}
    assert ("S[dcl]/NP", RuleKind.FC) in tables.binary[(r"S/(S\NP)", r"(S[dcl]\NP)/NP")]


def test_min_count(entries):
    tables = extract_grammar(entries, min_count=2)
    assert all(n >= 2 for n in tables.category_counts.values())
    assert "(NP/N)\\NP" not in tables.category_counts


def test_oracle_application_tags(by_id, markedup):
    files = gold_oracle([by_id["application-only"]], markedup)
    lines = files.tags.splitlines()
    assert len(lines) == 6
    assert all(len(line.split("\t")[2].split()) == 1 for line in lines)
    assert lines[0] == "0\tInvestors\tNP:0.0"


def test_oracle_object_relative_chart(by_id, markedup):
    files = gold_oracle([by_id["object-relative"]], markedup)
    chart = load_score_charts(files.spans)[0]
    assert chart.get(3, 6, "S[dcl]/NP") == 0.0
    assert chart.get(3, 5, r"NP|S/(S\NP)") == 0.0
    # the NP under the type-raising step is covered by the chain label
    assert chart.get(3, 5, "NP") is None


def test_oracle_empty():
    files = gold_oracle([], None)
    assert (files.tags, files.spans, files.deps) == ("", "", "")


def test_oracle_skips_unreplayable(markedup):
    # a unary chain of depth three cannot be built by the decoder
    text = "(<T S/(S\\NP) >T> (<T NP TC> (<T N TC> (<L N/N big 0>))))\n"
    entries = load_treebank(text)
    with pytest.raises(CCGError):
        replay(entries[0].tree, markedup)
    files = gold_oracle(entries, markedup)
    assert files.tags == "" and len(files.skipped) == 1


def test_scored_labels_chain(by_id, markedup):
    item = replay(by_id["relative-unary-chain"].tree, markedup)
    labels = scored_labels(item)
    assert (3, 4, r"N|NP|S/(S\NP)") in labels
    assert len(labels) == len({(s, e) for s, e, _ in labels})


def test_parse_tree_spans():
    tree = parse_tree("(<T S[dcl] <> (<L NP it 0>) (<L S[dcl]\\NP rained 1>))")
    assert (tree.start, tree.end) == (0, 2)
    assert [(c.start, c.end) for c in tree.children] == [(0, 1), (1, 2)]
