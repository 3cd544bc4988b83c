"""Brute-force oracles and generators for testing the decoder.

:func:`enumerate_all_derivations` builds every derivation the grammar
licenses, with no beam and no item limit, using the same item constructors
as the decoder so scores are computed identically.
"""

from __future__ import annotations

import random

from .categories import parse_category
from .chart import ChartItem, close_unary, make_binary, make_leaf
from .errors import BudgetExceeded
from .grammar import GrammarTables, RuleKind, apply_binary
from .markedup import MarkedupTable, load_markedup
from .scoring import ScoreConfig

TOY_LEXICON = {
    "NP/N": ["the", "a"],
    "N": ["dog", "cat", "park", "telescope", "man"],
    "NP": ["John", "Mary", "it"],
    "N/N": ["old", "big"],
    r"(S[dcl]\NP)/NP": ["saw", "liked", "chased"],
    r"S[dcl]\NP": ["slept", "ran"],
    r"(NP\NP)/NP": ["with", "near"],
    r"((S\NP)\(S\NP))/NP": ["with", "in"],
    r"(S\NP)\(S\NP)": ["today", "quietly"],
    r"(NP\NP)/(S[dcl]/NP)": ["that", "which"],
    "period": ["."],
}

TOY_BINARY = [
    ("NP/N", "N", "NP", RuleKind.FA),
    ("N/N", "N", "N", RuleKind.FA),
    (r"(S[dcl]\NP)/NP", "NP", r"S[dcl]\NP", RuleKind.FA),
    ("NP", r"S[dcl]\NP", "S[dcl]", RuleKind.BA),
    (r"(NP\NP)/NP", "NP", r"NP\NP", RuleKind.FA),
    ("NP", r"NP\NP", "NP", RuleKind.BA),
    (r"((S\NP)\(S\NP))/NP", "NP", r"(S\NP)\(S\NP)", RuleKind.FA),
    (r"S[dcl]\NP", r"(S\NP)\(S\NP)", r"S[dcl]\NP", RuleKind.BA),
    (r"S/(S\NP)", r"(S[dcl]\NP)/NP", "S[dcl]/NP", RuleKind.FC),
    (r"(NP\NP)/(S[dcl]/NP)", "S[dcl]/NP", r"NP\NP", RuleKind.FA),
    (r"(S[dcl]\NP)/NP", r"(S\NP)\(S\NP)", r"(S[dcl]\NP)/NP", RuleKind.BX),
    ("S[dcl]", "period", "S[dcl]", RuleKind.TB),
]

TOY_UNARY = [
    ("NP", r"S/(S\NP)", RuleKind.TR),
    ("N", "NP", RuleKind.TC),
]

TOY_ROOTS = ("S[dcl]", "NP")

TOY_MARKEDUP = "\n".join([
    "NP{Y}/N{1}:Y",
    r"(NP{Y}\NP{1}:Y)/(S[dcl]{2}:Z/NP{Y*})",
])


def toy_grammar() -> tuple[GrammarTables, MarkedupTable]:
    """Small grammar (11 lexical categories, 14 rules) for exhaustive checks."""
    tables = GrammarTables()
    for cat, words in TOY_LEXICON.items():
        for word in words:
            tables.add_lexical(word, cat)
    for left, right, result, kind in TOY_BINARY:
        tables.add_binary(left, right, result, kind)
    for source, target, kind in TOY_UNARY:
        tables.add_unary(source, target, kind)
    for root in TOY_ROOTS:
        tables.add_root(root)
    return tables, load_markedup(TOY_MARKEDUP)


def enumerate_all_derivations(
    tokens,
    tag_sets,
    tables: GrammarTables,
    markedup: MarkedupTable,
    span_scores=None,
    score_cfg: ScoreConfig = ScoreConfig(),
    unary_depth: int = 2,
    budget: int = 2_000_000,
    any_root: bool = False,
) -> list[ChartItem]:
    """Every licensed derivation over the whole sentence with a root category.

    Raises :class:`BudgetExceeded` once more than ``budget`` items are built.
    """
    from .chart import _scorer

    n = len(tokens)
    scorer = _scorer(span_scores, tables)
    registry = tables.registry
    memo: dict = {}
    built = [0]

    def spend(count: int) -> None:
        built[0] += count
        if built[0] > budget:
            raise BudgetExceeded(f"more than {budget} items")

    def items(i: int, j: int) -> list:
        if (i, j) in memo:
            return memo[(i, j)]
        if j == i + 1:
            base = []
            for cat, logprob in tag_sets[i]:
                if not hasattr(cat, "is_complex"):
                    cat = parse_category(cat, registry)
                base.append(make_leaf(i, tokens[i], cat, logprob, markedup, score_cfg))
        else:
            base = []
            for k in range(i + 1, j):
                for left in items(i, k):
                    for right in items(k, j):
                        for rule in apply_binary(left.cat, right.cat, tables, registry=registry):
                            base.append(make_binary(left, right, rule, scorer, score_cfg, registry))
        spend(len(base))
        out = base + close_unary(base, tables, scorer, score_cfg, unary_depth)
        spend(len(out) - len(base))
        memo[(i, j)] = out
        return out

    return [it for it in items(0, n) if any_root or tables.is_root(it.cat)]


def best_derivation(derivations: list) -> ChartItem | None:
    if not derivations:
        return None
    return min(derivations, key=ChartItem.sort_key)


class HashScorer:
    """Deterministic pseudo-random span scores keyed by (seed, start, end, label).

    A fraction ``missing`` of labels is treated as absent from the chart.
    """

    def __init__(self, seed: int, missing: float = 0.1, low: float = -5.0, high: float = 0.0):
        self.seed = seed
        self.missing = missing
        self.low = low
        self.high = high

    def get(self, start: int, end: int, label: str):
        rng = random.Random(f"{self.seed}:{start}:{end}:{label}")
        if rng.random() < self.missing:
            return None
        return rng.uniform(self.low, self.high)


def _min_lengths() -> dict:
    lengths = {cat: 1 for cat in TOY_LEXICON}
    changed = True
    while changed:
        changed = False
        for left, right, result, _kind in TOY_BINARY:
            if left in lengths and right in lengths:
                n = lengths[left] + lengths[right]
                if n < lengths.get(result, 10**9):
                    lengths[result] = n
                    changed = True
        for source, target, _kind in TOY_UNARY:
            if source in lengths and lengths[source] < lengths.get(target, 10**9):
                lengths[target] = lengths[source]
                changed = True
    return lengths


_MIN = _min_lengths()


def _expand(cat: str, budget: int, rng: random.Random) -> list:
    """Leaf categories of a random derivation of ``cat`` with at most ``budget`` leaves."""
    options = []
    if cat in TOY_LEXICON:
        options.append(("leaf",))
    for left, right, result, _kind in TOY_BINARY:
        if result == cat and _MIN[left] + _MIN[right] <= budget:
            options.append(("bin", left, right))
    for source, target, _kind in TOY_UNARY:
        if target == cat and _MIN[source] <= budget:
            options.append(("un", source))
    choice = rng.choice(options)
    if choice[0] == "leaf":
        return [cat]
    if choice[0] == "un":
        return _expand(choice[1], budget, rng)
    _tag, left, right = choice
    left_budget = rng.randint(_MIN[left], budget - _MIN[right])
    lhs = _expand(left, left_budget, rng)
    return lhs + _expand(right, budget - len(lhs), rng)


def random_sentence(rng: random.Random, max_len: int = 8, distractors: int = 1):
    """Tokens and tag sets for a sentence the toy grammar can derive.

    Each token gets its gold category plus up to ``distractors`` other
    lexical categories, all with random log-probabilities.
    """
    target = rng.randint(1, max_len)
    for _ in range(1000):
        root = rng.choice(TOY_ROOTS)
        cats = _expand(root, max(target, _MIN[root]), rng)
        if len(cats) == target:
            break
    lexical = sorted(TOY_LEXICON)
    tokens, tag_sets = [], []
    for cat in cats:
        tokens.append(rng.choice(TOY_LEXICON[cat]))
        chosen = {cat}
        for _ in range(rng.randint(0, distractors)):
            chosen.add(rng.choice(lexical))
        tag_sets.append([(c, -rng.uniform(0.0, 4.0)) for c in sorted(chosen)])
    return tokens, tag_sets
