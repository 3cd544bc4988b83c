from __future__ import annotations

from ccgbeam.categories import parse_category as C
from ccgbeam.corpus import parse_tree, replay
from ccgbeam.chart import collect_dependencies
from ccgbeam.grammar import RuleKind
from ccgbeam.markedup import annotate, default_annotation
from ccgbeam.propagation import Dependency, lexical_state, passes_heads, propagate_dependencies


def deps_of(tree_text, markedup):
    return sorted(collect_dependencies(replay(parse_tree(tree_text), markedup)))


def test_lexical_state():
    state = lexical_state(annotate(r"(S[dcl]\NP{1})/NP{2}"), 4)
    assert state.heads == frozenset({4})
    assert [(p.slot, p.head) for p in state.pending] == [(1, 4), (2, 4)]


def test_forward_application_fills_slot():
    det = lexical_state(annotate("NP{Y}/N{1}:Y"), 0)
    noun = lexical_state(default_annotation(C("N")), 1)
    state, filled = propagate_dependencies(RuleKind.FA, C("NP/N"), C("N"), C("NP"), det, noun)
    assert filled == (Dependency(0, "NP/N", 1, 1),)
    # the determiner passes the noun up as head of the NP
    assert state.heads == frozenset({1})


def test_modifier_passes_argument_heads():
    adv = lexical_state(annotate(r"(S\NP)\(S{1}\NP)"), 2)
    verb = lexical_state(default_annotation(C(r"S[dcl]\NP")), 1)
    state, filled = propagate_dependencies(
        RuleKind.BA, C(r"S[dcl]\NP"), C(r"(S\NP)\(S\NP)"), C(r"S[dcl]\NP"), verb, adv
    )
    assert filled == (Dependency(2, r"(S\NP)\(S\NP)", 1, 1),)
    assert state.heads == frozenset({1})
    assert [p.head for p in state.pending] == [1]


def test_passes_heads():
    assert passes_heads(C(r"(S\NP)\(S\NP)"))
    assert passes_heads(C("N/N"))
    assert not passes_heads(C(r"(S[dcl]\NP)/(S[b]\NP)"))
    assert not passes_heads(C("NP/N"))


def test_long_range_object_extraction(by_id, markedup):
    deps = deps_of(by_id["object-relative"].tree.to_string(), markedup)
    long_range = [d for d in deps if d.long_range]
    assert long_range == [Dependency(5, r"(S[dcl]\NP)/NP", 2, 1, True)]
    assert Dependency(5, r"(S[dcl]\NP)/NP", 1, 4) in deps


def test_coordination_gives_multiple_fillers(by_id, markedup):
    deps = deps_of(by_id["np-coordination"].tree.to_string(), markedup)
    assert deps == [Dependency(3, r"S[dcl]\NP", 1, 0), Dependency(3, r"S[dcl]\NP", 1, 2)]
    deps = deps_of(by_id["vp-coordination"].tree.to_string(), markedup)
    objects = sorted((d.head, d.arg) for d in deps if d.slot == 2)
    assert objects == [(1, 4), (3, 4)]


def test_punctuation_absorption_keeps_heads(by_id, markedup):
    with_period = deps_of(by_id["period"].tree.to_string(), markedup)
    assert with_period == [Dependency(1, r"S[dcl]\NP", 1, 0)]


def test_auxiliary_and_crossed_composition(by_id, markedup):
    deps = deps_of(by_id["crossed-composition"].tree.to_string(), markedup)
    assert Dependency(1, r"(S[dcl]\NP)/(S[b]\NP)", 2, 3) in deps
    # the subject of "will" is shared with the bare verb through the markedup variable
    assert Dependency(3, r"(S[b]\NP)/NP", 1, 0) in deps
    assert Dependency(2, r"(S\NP)\(S\NP)", 1, 1) in deps
