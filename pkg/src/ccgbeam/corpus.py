"""Treebank reading and writing, grammar extraction and gold oracle files.

Treebank format: one derivation per line, optionally preceded by a
``# id NAME`` line. Internal nodes are ``(<T category rule> child child)``
and leaves ``(<L category word index>)`` with 0-based token indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .categories import DEFAULT_REGISTRY, AtomRegistry, Category, FeatureBinding, parse_category
from .chart import ChartItem, collect_dependencies, make_binary, make_leaf, make_unary
from .errors import CCGError, FormatError
from .grammar import (
    BinaryResult,
    GrammarTables,
    RuleKind,
    UnaryResult,
    infer_binary_kind,
    infer_unary_kind,
    kind_from_symbol,
)
from .markedup import MarkedupTable
from .scoring import ScoreChart, ScoreConfig

_LEAF = re.compile(r"\(<L (\S+) (\S+) (\d+)>\)")
_NODE = re.compile(r"\(<T (\S+) (\S+?)>(?=[\s)])")


@dataclass(frozen=True)
class Tree:
    cat: Category
    rule: str | None = None  # rule symbol as written; None for leaves
    children: tuple = ()
    word: str | None = None
    start: int = 0
    end: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.rule is None

    def leaves(self) -> list:
        if self.is_leaf:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def to_string(self) -> str:
        if self.is_leaf:
            return f"(<L {self.cat} {self.word} {self.start}>)"
        inner = " ".join(c.to_string() for c in self.children)
        return f"(<T {self.cat} {self.rule}> {inner})"


@dataclass(frozen=True)
class TreebankEntry:
    id: str
    tokens: tuple
    tree: Tree


class _TreeParser:
    def __init__(self, text: str, registry: AtomRegistry):
        self.text = text
        self.pos = 0
        self.registry = registry
        self.next_index = 0

    def fail(self, message: str) -> FormatError:
        return FormatError(f"{message} at column {self.pos + 1}")

    def skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def category(self, text: str) -> Category:
        try:
            return parse_category(text, self.registry)
        except FormatError as exc:
            raise self.fail(str(exc)) from None

    def node(self) -> Tree:
        m = _LEAF.match(self.text, self.pos)
        if m:
            index = int(m.group(3))
            if index != self.next_index:
                raise self.fail(f"leaf index {index}, expected {self.next_index}")
            self.next_index += 1
            cat = self.category(m.group(1))
            self.pos = m.end()
            return Tree(cat, None, (), m.group(2), index, index + 1)
        m = _NODE.match(self.text, self.pos)
        if not m:
            raise self.fail("expected '(<T' or '(<L'")
        cat = self.category(m.group(1))
        rule = m.group(2)
        try:
            kind_from_symbol(rule)
        except FormatError as exc:
            raise self.fail(str(exc)) from None
        self.pos = m.end()
        children = []
        while True:
            self.skip_space()
            if self.pos >= len(self.text):
                raise self.fail("unbalanced brackets: missing ')'")
            if self.text[self.pos] == ")":
                self.pos += 1
                break
            children.append(self.node())
        if len(children) not in (1, 2):
            raise self.fail(f"internal node with {len(children)} children")
        unary = kind_from_symbol(rule).unary
        if unary != (len(children) == 1):
            raise self.fail(f"rule {rule} with {len(children)} children")
        return Tree(cat, rule, tuple(children), None, children[0].start, children[-1].end)

    def parse(self) -> Tree:
        self.skip_space()
        tree = self.node()
        self.skip_space()
        if self.pos != len(self.text):
            raise self.fail("trailing text after derivation")
        return tree


def parse_tree(text: str, registry: AtomRegistry = DEFAULT_REGISTRY) -> Tree:
    return _TreeParser(text.strip(), registry).parse()


def load_treebank(
    text: str,
    registry: AtomRegistry = DEFAULT_REGISTRY,
    source: str | None = None,
    lenient: bool = False,
    problems: list | None = None,
) -> list[TreebankEntry]:
    """Parse treebank text.

    With ``lenient`` malformed lines are skipped and their errors appended to
    ``problems`` instead of raised.
    """
    entries = []
    pending_id = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if len(parts) == 2 and parts[0] == "id":
                pending_id = parts[1].strip()
            continue
        try:
            tree = parse_tree(line, registry)
        except FormatError as exc:
            err = FormatError(str(exc), lineno, source)
            if not lenient:
                raise err from None
            if problems is not None:
                problems.append(err)
            pending_id = None
            continue
        ident = pending_id if pending_id is not None else str(len(entries) + 1)
        tokens = tuple(leaf.word for leaf in tree.leaves())
        entries.append(TreebankEntry(ident, tokens, tree))
        pending_id = None
    return entries


def read_treebank(path: str | Path, registry: AtomRegistry = DEFAULT_REGISTRY, lenient: bool = False,
                  problems: list | None = None) -> list[TreebankEntry]:
    path = Path(path)
    return load_treebank(path.read_text(), registry, str(path), lenient, problems)


def write_treebank(entries) -> str:
    lines = []
    for entry in entries:
        lines.append(f"# id {entry.id}")
        lines.append(entry.tree.to_string())
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# grammar extraction


def _internal_nodes(tree: Tree):
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            continue
        yield node
        stack.extend(node.children)


def extract_grammar(entries, min_count: int = 1, registry: AtomRegistry | None = None) -> GrammarTables:
    """Count lexical categories, rule instances and roots over ``entries``.

    Rule kinds are inferred from the categories (application before
    composition before crossed composition, otherwise treebank-binary or
    type-changing). Lexical categories seen fewer than ``min_count`` times are
    dropped from the lexicon.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if registry is None:
        registry = DEFAULT_REGISTRY
    tables = GrammarTables(registry=registry)
    for entry in entries:
        for leaf in entry.tree.leaves():
            tables.add_lexical(leaf.word, str(leaf.cat))
        for node in _internal_nodes(entry.tree):
            if len(node.children) == 2:
                left, right = node.children
                kind = infer_binary_kind(left.cat, right.cat, node.cat, registry)
                tables.add_binary(str(left.cat), str(right.cat), str(node.cat), kind)
            else:
                source = node.children[0].cat
                tables.add_unary(str(source), str(node.cat), infer_unary_kind(source, node.cat, registry))
        tables.add_root(str(entry.tree.cat))
    if min_count > 1:
        keep = {c for c, n in tables.category_counts.items() if n >= min_count}
        tables.category_counts = {c: n for c, n in tables.category_counts.items() if c in keep}
        for word in list(tables.lexicon):
            cats = {c: n for c, n in tables.lexicon[word].items() if c in keep}
            if cats:
                tables.lexicon[word] = cats
            else:
                del tables.lexicon[word]
    return tables


# ---------------------------------------------------------------------------
# replaying gold trees


class _ZeroScorer:
    def get(self, start, end, label):
        return 0.0


def replay(
    tree: Tree,
    markedup: MarkedupTable,
    registry: AtomRegistry = DEFAULT_REGISTRY,
    scorer=None,
    score_cfg: ScoreConfig = ScoreConfig(),
    unary_depth: int | None = 2,
) -> ChartItem:
    """Rebuild a gold tree as chart items, filling dependencies on the way.

    Raises :class:`CCGError` when a node cannot be derived by the engine's
    schemata and is not a treebank-binary or type-changing step, or when a
    unary chain is longer than ``unary_depth``.
    """
    scorer = _ZeroScorer() if scorer is None else scorer

    def build(node: Tree) -> ChartItem:
        if node.is_leaf:
            return make_leaf(node.start, node.word, node.cat, 0.0, markedup, score_cfg)
        children = [build(c) for c in node.children]
        if len(children) == 2:
            left, right = children
            kind = infer_binary_kind(left.cat, right.cat, node.cat, registry)
            return make_binary(left, right, BinaryResult(node.cat, kind, FeatureBinding()),
                               scorer, score_cfg, registry)
        child = children[0]
        kind = infer_unary_kind(child.cat, node.cat, registry)
        item = make_unary(child, UnaryResult(node.cat, kind), scorer, score_cfg)
        if unary_depth is not None and len(item.chain) - 1 > unary_depth:
            raise CCGError(f"unary chain {'|'.join(item.chain)} longer than {unary_depth}")
        return item

    return build(tree)


def scored_labels(item: ChartItem) -> list:
    """(start, end, label) for every scored internal node of a derivation.

    A unary chain contributes one chain label at its top; a binary node
    directly under a unary chain is covered by that chain label.
    """
    out = []

    def walk(node: ChartItem, under_unary: bool) -> None:
        if node.is_leaf:
            return
        if not under_unary:
            out.append((node.start, node.end, node.label))
        for child in node.children:
            walk(child, node.kind.unary)

    walk(item, False)
    return out


@dataclass
class OracleFiles:
    tags: str
    spans: str
    deps: str
    skipped: list = field(default_factory=list)  # (entry id, reason)


def gold_oracle(
    entries,
    markedup: MarkedupTable,
    registry: AtomRegistry = DEFAULT_REGISTRY,
    unary_depth: int = 2,
) -> OracleFiles:
    """Tag file, score chart file and gold dependency file for ``entries``.

    Gold lexical categories get log-probability 0, every gold span label gets
    score 0 and gold dependencies come from replaying the gold tree. Entries
    the engine cannot replay are skipped and listed in ``skipped``.
    """
    from .evaluation import format_sentence
    from .multitagger import TagDistribution, format_tag_sentence

    tag_blocks, span_blocks, dep_blocks, skipped = [], [], [], []
    for entry in entries:
        try:
            item = replay(entry.tree, markedup, registry, unary_depth=unary_depth)
        except CCGError as exc:
            skipped.append((entry.id, str(exc)))
            continue
        leaves = entry.tree.leaves()
        dists = [TagDistribution(leaf.start, leaf.word, ((str(leaf.cat), 0.0),)) for leaf in leaves]
        tag_blocks.append(format_tag_sentence(dists))
        chart = ScoreChart(len(leaves))
        for start, end, label in scored_labels(item):
            chart.add(start, end, label, 0.0)
        span_blocks.append(chart.to_text())
        dep_blocks.append(format_sentence(collect_dependencies(item), [str(leaf.cat) for leaf in leaves]))
    return OracleFiles("\n".join(tag_blocks), "\n".join(span_blocks), "\n".join(dep_blocks), skipped)
