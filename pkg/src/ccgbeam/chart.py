"""CKY chart with per-cell beams, and the skimmer fallback."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .categories import Category, parse_category
from .errors import CCGError
from .grammar import SEEN, BinaryResult, GrammarTables, RuleKind, UnaryResult, apply_binary, apply_unary
from .markedup import MarkedupTable
from .propagation import HeadState, lexical_state, propagate_dependencies, propagate_unary
from .scoring import CHAIN_SEPARATOR, FrequencyScorer, ScoreConfig, span_score


class ChartItem:
    """One analysis of a span: a derivation node with score and head state."""

    __slots__ = (
        "start", "end", "cat", "kind", "children", "chain", "score", "inside",
        "local", "state", "filled", "sig", "word", "logprob",
    )

    def __init__(self, start, end, cat, kind, children, chain, inside, local, state, filled,
                 word=None, logprob=0.0):
        self.start = start
        self.end = end
        self.cat = cat
        self.kind = kind
        self.children = children
        self.chain = chain
        self.inside = inside
        self.local = local
        self.score = inside + local
        self.state = state
        self.filled = filled
        self.word = word
        self.logprob = logprob
        if kind is None:
            self.sig = (str(cat), "L", start, ())
        else:
            split = children[0].end if len(children) == 2 else -1
            self.sig = (str(cat), kind.value, split, tuple(c.sig for c in children))

    @property
    def is_leaf(self) -> bool:
        return self.kind is None

    @property
    def label(self) -> str:
        return CHAIN_SEPARATOR.join(self.chain) if self.chain else str(self.cat)

    @property
    def heads(self) -> frozenset:
        return self.state.heads

    def sort_key(self):
        return (-self.score, self.sig)

    def __repr__(self) -> str:
        return f"ChartItem({self.start},{self.end},{self.cat},{self.score:.4g})"


def make_leaf(index: int, word: str, cat: Category, logprob: float,
              markedup: MarkedupTable, score_cfg: ScoreConfig) -> ChartItem:
    state = lexical_state(markedup.resolve(cat), index, str(cat))
    return ChartItem(index, index + 1, cat, None, (), None, 0.0, score_cfg.w_st * logprob,
                     state, (), word=word, logprob=logprob)


def make_binary(left: ChartItem, right: ChartItem, rule: BinaryResult, scorer,
                score_cfg: ScoreConfig, registry) -> ChartItem:
    state, filled = propagate_dependencies(
        rule.kind, left.cat, right.cat, rule.result, left.state, right.state, registry
    )
    local = span_score(scorer, left.start, right.end, str(rule.result), score_cfg)
    return ChartItem(left.start, right.end, rule.result, rule.kind, (left, right), None,
                     left.score + right.score, local, state, filled)


def make_unary(child: ChartItem, rule: UnaryResult, scorer, score_cfg: ScoreConfig) -> ChartItem:
    if child.is_leaf:
        chain, inside = (str(child.cat), str(rule.result)), child.score
    elif child.kind.unary:
        chain, inside = child.chain + (str(rule.result),), child.inside
    else:
        chain, inside = (str(child.cat), str(rule.result)), child.inside
    state = propagate_unary(rule.kind, child.cat, rule.result, child.state)
    local = span_score(scorer, child.start, child.end, CHAIN_SEPARATOR.join(chain), score_cfg)
    return ChartItem(child.start, child.end, rule.result, rule.kind, (child,), chain,
                     inside, local, state, ())


def unary_depth(item: ChartItem) -> int:
    return len(item.chain) - 1 if item.chain else 0


@dataclass(frozen=True)
class DecodeConfig:
    beam: int = 32
    max_items: int = 1_000_000
    unary_depth: int = 2
    any_root: bool = False
    rule_mode: str = SEEN

    def __post_init__(self):
        if self.beam < 1:
            raise ValueError("beam width must be >= 1")
        if self.unary_depth < 0:
            raise ValueError("unary depth limit must be >= 0")


@dataclass
class Chart:
    n: int
    cells: dict = field(default_factory=dict)
    created: int = 0
    overflow: bool = False

    def cell(self, start: int, end: int) -> list:
        return self.cells.get((start, end), [])


@dataclass
class ParseResult:
    tokens: list
    fragments: list
    skimmed: bool
    overflow: bool = False

    @property
    def derivation(self) -> ChartItem | None:
        return None if self.skimmed else self.fragments[0]

    @property
    def score(self) -> float:
        return sum(f.score for f in self.fragments)

    @property
    def dependencies(self) -> list:
        deps = []
        for fragment in self.fragments:
            deps.extend(collect_dependencies(fragment))
        return deps

    @property
    def categories(self) -> list:
        cats = []
        for fragment in self.fragments:
            cats.extend(str(leaf.cat) for leaf in leaves(fragment))
        return cats


def leaves(item: ChartItem):
    stack = [item]
    out = []
    while stack:
        node = stack.pop()
        if node.is_leaf:
            out.append(node)
        else:
            stack.extend(reversed(node.children))
    return out


def nodes(item: ChartItem):
    """Postorder traversal."""
    for child in item.children:
        yield from nodes(child)
    yield item


def collect_dependencies(item: ChartItem) -> list:
    deps = []
    for node in nodes(item):
        deps.extend(node.filled)
    return deps


def derivation_to_string(item: ChartItem) -> str:
    if item.is_leaf:
        return f"(<L {item.cat} {item.word} {item.start}>)"
    inner = " ".join(derivation_to_string(c) for c in item.children)
    return f"(<T {item.cat} {item.kind.symbol(item.cat)}> {inner})"


def _top_k(items: list, k: int) -> list:
    if len(items) <= k:
        return sorted(items, key=ChartItem.sort_key)
    return heapq.nsmallest(k, items, key=ChartItem.sort_key)


def close_unary(items: list, tables: GrammarTables, scorer, score_cfg: ScoreConfig, depth: int) -> list:
    """Unary rules applied on top of ``items``, up to ``depth`` steps per chain."""
    out = []
    frontier = items
    for _ in range(depth):
        grown = []
        for item in frontier:
            for rule in apply_unary(item.cat, tables):
                if item.chain and str(rule.result) in item.chain:
                    continue
                grown.append(make_unary(item, rule, scorer, score_cfg))
        out.extend(grown)
        frontier = grown
    return out


def _scorer(span_scores, tables: GrammarTables):
    if span_scores is not None:
        return span_scores
    if tables._frequency is None:
        tables._frequency = FrequencyScorer(tables)
    return tables._frequency


def _check_inputs(tokens, tag_sets) -> None:
    if len(tokens) == 0:
        raise CCGError("cannot parse a zero-length sentence")
    if len(tag_sets) != len(tokens):
        raise CCGError(f"{len(tag_sets)} tag sets for {len(tokens)} tokens")
    for i, tags in enumerate(tag_sets):
        if not tags:
            raise CCGError(f"empty tag set for token {i} ({tokens[i]!r})")


def fill_chart(
    tokens,
    tag_sets,
    tables: GrammarTables,
    markedup: MarkedupTable,
    span_scores=None,
    cfg: DecodeConfig = DecodeConfig(),
    score_cfg: ScoreConfig = ScoreConfig(),
) -> Chart:
    """Fill cells bottom-up by span length, keeping the top ``cfg.beam`` items per cell.

    Stops early with ``overflow`` set once more than ``cfg.max_items`` items
    have been built.
    """
    _check_inputs(tokens, tag_sets)
    n = len(tokens)
    registry = tables.registry
    scorer = _scorer(span_scores, tables)
    chart = Chart(n)

    for i, (word, tags) in enumerate(zip(tokens, tag_sets)):
        items = []
        for cat, logprob in tags:
            if not hasattr(cat, "is_complex"):
                cat = parse_category(cat, registry)
            items.append(make_leaf(i, word, cat, logprob, markedup, score_cfg))
        items += close_unary(items, tables, scorer, score_cfg, cfg.unary_depth)
        chart.created += len(items)
        chart.cells[(i, i + 1)] = _top_k(items, cfg.beam)

    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            items = []
            for k in range(i + 1, j):
                lefts, rights = chart.cells[(i, k)], chart.cells[(k, j)]
                for left in lefts:
                    for right in rights:
                        for rule in apply_binary(left.cat, right.cat, tables, cfg.rule_mode, registry):
                            items.append(make_binary(left, right, rule, scorer, score_cfg, registry))
            items += close_unary(items, tables, scorer, score_cfg, cfg.unary_depth)
            chart.created += len(items)
            chart.cells[(i, j)] = _top_k(items, cfg.beam)
            if chart.created > cfg.max_items:
                chart.overflow = True
                return chart
    return chart


def decode(
    tokens,
    tag_sets,
    tables: GrammarTables,
    markedup: MarkedupTable,
    span_scores=None,
    cfg: DecodeConfig = DecodeConfig(),
    score_cfg: ScoreConfig = ScoreConfig(),
) -> ParseResult:
    """Best legal derivation for one sentence, or skimmed fragments.

    ``tag_sets`` holds one list of ``(category, log-probability)`` per token.
    Without ``span_scores`` the frequency scorer built from ``tables`` is used.
    """
    chart = fill_chart(tokens, tag_sets, tables, markedup, span_scores, cfg, score_cfg)
    if not chart.overflow:
        for item in chart.cell(0, chart.n):
            if cfg.any_root or tables.is_root(item.cat):
                return ParseResult(list(tokens), [item], skimmed=False)
    return skim(chart, list(tokens))


def skim(chart: Chart, tokens=None) -> ParseResult:
    """Cover ``[0, n)`` with chart items: fewest fragments, then highest total score.

    Every single-token cell holds at least one item, so a cover always exists.
    """
    n = chart.n
    best: list = [None] * (n + 1)
    best[0] = (0, 0.0, None, None)
    for j in range(1, n + 1):
        for i in range(j):
            if best[i] is None:
                continue
            cell = chart.cell(i, j)
            if not cell:
                continue
            item = cell[0]
            count, total = best[i][0] + 1, best[i][1] + item.score
            current = best[j]
            if current is None or count < current[0] or (count == current[0] and total > current[1]):
                best[j] = (count, total, i, item)
    if best[n] is None:
        raise CCGError("chart has an uncovered token position")
    fragments = []
    j = n
    while j > 0:
        _count, _total, i, item = best[j]
        fragments.append(item)
        j = i
    fragments.reverse()
    if tokens is None:
        tokens = [leaf.word for f in fragments for leaf in leaves(f)]
    return ParseResult(list(tokens), fragments, skimmed=True, overflow=chart.overflow)


def validate_derivation(item: ChartItem, tables: GrammarTables, mode: str = SEEN) -> list:
    """Problems found re-checking every node against the rule tables (empty if licensed)."""
    problems = []
    for node in nodes(item):
        if node.is_leaf:
            continue
        if node.kind.unary:
            child = node.children[0]
            ok = (child.start, child.end) == (node.start, node.end) and any(
                r.result == node.cat and r.kind is node.kind for r in apply_unary(child.cat, tables)
            )
        else:
            left, right = node.children
            ok = (
                left.start == node.start and left.end == right.start and right.end == node.end
                and any(
                    r.result == node.cat and r.kind is node.kind
                    for r in apply_binary(left.cat, right.cat, tables, mode)
                )
            )
        if not ok:
            problems.append(f"unlicensed {node.kind.value} node {node.cat} over ({node.start},{node.end})")
    return problems
