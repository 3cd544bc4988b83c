"""Combinatory rules and the treebank-derived rule tables.

Two modes of rule application are supported. ``generic`` applies the
combinator schemata to any pair of categories; ``seen`` keeps only rule
instances recorded in :class:`GrammarTables` (plus verbatim treebank-binary
instances such as coordination and punctuation absorption), which keeps the
working grammar effectively context free.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

from .categories import (
    BACKWARD,
    DEFAULT_REGISTRY,
    FORWARD,
    AtomRegistry,
    Category,
    Complex,
    FeatureBinding,
    erase_variables,
    has_variable,
    is_modifier,
    is_type_raised,
    lift_features,
    parse_category,
    unify,
)
from .errors import FormatError

GRAMMAR_FORMAT_VERSION = 1

SEEN = "seen"
GENERIC = "generic"


class RuleKind(str, Enum):
    FA = "forward-application"
    BA = "backward-application"
    FC = "forward-composition"
    BC = "backward-composition"
    BX = "backward-crossed-composition"
    TB = "treebank-binary"
    TR = "type-raising"
    TC = "type-changing"

    @property
    def unary(self) -> bool:
        return self in (RuleKind.TR, RuleKind.TC)

    def symbol(self, result: Category | None = None) -> str:
        if self is RuleKind.TR:
            return "<T" if result is not None and result.slash == BACKWARD else ">T"
        return _SYMBOLS[self]


_SYMBOLS = {
    RuleKind.FA: ">",
    RuleKind.BA: "<",
    RuleKind.FC: ">B",
    RuleKind.BC: "<B",
    RuleKind.BX: "<Bx",
    RuleKind.TB: "TB",
    RuleKind.TC: "TC",
}
_FROM_SYMBOL = {v: k for k, v in _SYMBOLS.items()}
_FROM_SYMBOL[">T"] = RuleKind.TR
_FROM_SYMBOL["<T"] = RuleKind.TR

# preference order when several schemata derive the same result
BINARY_KIND_ORDER = (RuleKind.FA, RuleKind.BA, RuleKind.FC, RuleKind.BC, RuleKind.BX)


def kind_from_symbol(symbol: str) -> RuleKind:
    try:
        return _FROM_SYMBOL[symbol]
    except KeyError:
        raise FormatError(f"unknown rule symbol {symbol!r}") from None


class BinaryResult(NamedTuple):
    result: Category
    kind: RuleKind
    binding: FeatureBinding


class UnaryResult(NamedTuple):
    result: Category
    kind: RuleKind


@dataclass
class GrammarTables:
    """Lexicon, seen rule instances with counts, and legal root categories."""

    lexicon: dict = field(default_factory=dict)  # word -> {category: count}
    category_counts: dict = field(default_factory=dict)  # lexical category -> count
    binary: dict = field(default_factory=dict)  # (left, right) -> {(result, kind): count}
    unary: dict = field(default_factory=dict)  # source -> {(target, kind): count}
    roots: dict = field(default_factory=dict)  # category -> count
    registry: AtomRegistry = DEFAULT_REGISTRY
    _binary_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _unary_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _root_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _frequency: object = field(default=None, repr=False, compare=False)

    def add_binary(self, left: str, right: str, result: str, kind: RuleKind, count: int = 1) -> None:
        bucket = self.binary.setdefault((left, right), {})
        bucket[(result, kind)] = bucket.get((result, kind), 0) + count
        self._binary_cache.clear()
        self._frequency = None

    def add_unary(self, source: str, target: str, kind: RuleKind, count: int = 1) -> None:
        if source == target:
            raise ValueError(f"unary rule with identical source and target {source}")
        bucket = self.unary.setdefault(source, {})
        bucket[(target, kind)] = bucket.get((target, kind), 0) + count
        self._unary_cache.clear()
        self._frequency = None

    def add_root(self, cat: str, count: int = 1) -> None:
        self.roots[cat] = self.roots.get(cat, 0) + count
        self._root_cache.clear()

    def add_lexical(self, word: str, cat: str, count: int = 1) -> None:
        entry = self.lexicon.setdefault(word, {})
        entry[cat] = entry.get(cat, 0) + count
        self.category_counts[cat] = self.category_counts.get(cat, 0) + count

    @property
    def binary_count(self) -> int:
        return sum(sum(b.values()) for b in self.binary.values())

    @property
    def unary_count(self) -> int:
        return sum(sum(b.values()) for b in self.unary.values())

    def is_root(self, cat: Category) -> bool:
        key = str(cat)
        hit = self._root_cache.get(key)
        if hit is None:
            hit = key in self.roots or any(
                unify(cat, parse_category(r, self.registry), self.registry) is not None
                for r in self.roots
            )
            self._root_cache[key] = hit
        return hit

    def label_counts(self) -> dict:
        """How often each category occurs as a rule result or unary target."""
        counts: dict = defaultdict(int)
        for bucket in self.binary.values():
            for (result, _kind), n in bucket.items():
                counts[result] += n
        for bucket in self.unary.values():
            for (target, _kind), n in bucket.items():
                counts[target] += n
        return dict(counts)


# ---------------------------------------------------------------------------
# rule application


def _functor(cat: Category, registry: AtomRegistry) -> Category:
    if (is_modifier(cat) or is_type_raised(cat)) and not has_variable(cat, registry):
        return lift_features(cat, registry)
    return cat


def _generic_binary(left: Category, right: Category, registry: AtomRegistry) -> list[BinaryResult]:
    found = []
    if left.is_complex and left.slash == FORWARD:
        f = _functor(left, registry)
        u = unify(f.argument, right, registry)
        if u is not None:
            found.append((u[1].apply(f.result), RuleKind.FA, u[1]))
        if right.is_complex and right.slash == FORWARD:
            u = unify(f.argument, right.result, registry)
            if u is not None:
                b = u[1]
                found.append((Complex(b.apply(f.result), FORWARD, b.apply(right.argument)), RuleKind.FC, b))
    if right.is_complex and right.slash == BACKWARD:
        f = _functor(right, registry)
        u = unify(left, f.argument, registry)
        if u is not None:
            found.append((u[1].apply(f.result), RuleKind.BA, u[1]))
        if left.is_complex:
            u = unify(f.argument, left.result, registry)
            if u is not None:
                b = u[1]
                kind = RuleKind.BC if left.slash == BACKWARD else RuleKind.BX
                found.append((Complex(b.apply(f.result), left.slash, b.apply(left.argument)), kind, b))
    out, seen = [], set()
    for result, kind, binding in found:
        result = erase_variables(result, registry)
        key = (str(result), kind)
        if key not in seen:
            seen.add(key)
            out.append(BinaryResult(result, kind, binding))
    out.sort(key=lambda r: BINARY_KIND_ORDER.index(r.kind))
    return out


def apply_binary(
    left: Category,
    right: Category,
    tables: GrammarTables | None = None,
    mode: str = SEEN,
    registry: AtomRegistry | None = None,
) -> list[BinaryResult]:
    """All results of combining ``left`` and ``right``.

    In ``generic`` mode: forward/backward application, forward/backward
    composition and backward crossed composition, each requiring the
    cancelling categories to unify. In ``seen`` mode the generic results are
    filtered against ``tables`` and treebank-binary instances for the pair are
    added verbatim.
    """
    if registry is None:
        registry = tables.registry if tables is not None else DEFAULT_REGISTRY
    if mode == GENERIC:
        return _generic_binary(left, right, registry)
    if mode != SEEN:
        raise ValueError(f"unknown rule mode {mode!r}")
    if tables is None:
        raise ValueError("seen-rules mode needs grammar tables")
    key = (str(left), str(right))
    cached = tables._binary_cache.get(key)
    if cached is not None:
        return cached
    entry = tables.binary.get(key)
    if not entry:
        out: list = []
    else:
        out = [r for r in _generic_binary(left, right, registry) if (str(r.result), r.kind) in entry]
        for result, kind in sorted(entry):
            if kind is RuleKind.TB:
                out.append(BinaryResult(parse_category(result, registry), kind, FeatureBinding()))
    tables._binary_cache[key] = out
    return out


def apply_unary(cat: Category, tables: GrammarTables) -> list[UnaryResult]:
    """Targets of every unary table entry whose source unifies with ``cat``.

    Unary rules are never generated from a schema; an empty table yields
    nothing.
    """
    key = str(cat)
    cached = tables._unary_cache.get(key)
    if cached is not None:
        return cached
    out = []
    for source in sorted(tables.unary):
        src = parse_category(source, tables.registry)
        if src != cat and unify(src, cat, tables.registry) is None:
            continue
        for target, kind in sorted(tables.unary[source]):
            result = parse_category(target, tables.registry)
            if result != cat and all(result != r.result for r in out):
                out.append(UnaryResult(result, kind))
    tables._unary_cache[key] = out
    return out


def infer_binary_kind(
    left: Category, right: Category, result: Category, registry: AtomRegistry = DEFAULT_REGISTRY
) -> RuleKind:
    """Schema that derives ``result`` from the pair, else treebank-binary.

    When several schemata fit, application wins over composition, and
    composition over crossed composition.
    """
    kinds = [r.kind for r in _generic_binary(left, right, registry) if r.result == result]
    return min(kinds, key=_INFERENCE_ORDER.index) if kinds else RuleKind.TB


_INFERENCE_ORDER = [RuleKind.FA, RuleKind.BA, RuleKind.FC, RuleKind.BC, RuleKind.BX]


def infer_unary_kind(source: Category, target: Category, registry: AtomRegistry = DEFAULT_REGISTRY) -> RuleKind:
    if is_type_raised(target) and unify(target.argument.argument, source, registry) is not None:
        return RuleKind.TR
    return RuleKind.TC


# ---------------------------------------------------------------------------
# grammar directory


def _kind(text: str, lineno: int, source: str) -> RuleKind:
    try:
        return RuleKind(text)
    except ValueError:
        raise FormatError(f"unknown rule kind {text!r}", lineno, source) from None


def _count(text: str, lineno: int, source: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise FormatError(f"bad count {text!r}", lineno, source) from None
    if n < 1:
        raise FormatError(f"count must be >= 1, got {n}", lineno, source)
    return n


def _records(path: Path):
    if not path.exists():
        return
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        yield lineno, raw.split("\t")


def _check_cat(text: str, registry: AtomRegistry, lineno: int, source: str) -> str:
    try:
        return str(parse_category(text, registry))
    except FormatError as exc:
        raise FormatError(str(exc), lineno, source) from None


def read_tables(directory: str | Path, registry: AtomRegistry | None = None) -> GrammarTables:
    directory = Path(directory)
    if registry is None:
        atoms = directory / "atoms.txt"
        registry = AtomRegistry.from_file(atoms) if atoms.exists() else DEFAULT_REGISTRY
    tables = GrammarTables(registry=registry)

    path = directory / "lexicon.txt"
    for lineno, fields in _records(path):
        if len(fields) == 3:
            word, cat, n = fields
            entry = tables.lexicon.setdefault(word, {})
            entry[_check_cat(cat, registry, lineno, str(path))] = _count(n, lineno, str(path))
        elif len(fields) == 2:
            cat, n = fields
            tables.category_counts[_check_cat(cat, registry, lineno, str(path))] = _count(n, lineno, str(path))
        else:
            raise FormatError("expected 2 or 3 tab-separated fields", lineno, str(path))

    path = directory / "binary_rules.txt"
    for lineno, fields in _records(path):
        if len(fields) != 5:
            raise FormatError("expected 5 tab-separated fields", lineno, str(path))
        left, right, result = (_check_cat(c, registry, lineno, str(path)) for c in fields[:3])
        tables.add_binary(left, right, result, _kind(fields[3], lineno, str(path)), _count(fields[4], lineno, str(path)))

    path = directory / "unary_rules.txt"
    for lineno, fields in _records(path):
        if len(fields) != 4:
            raise FormatError("expected 4 tab-separated fields", lineno, str(path))
        source, target = (_check_cat(c, registry, lineno, str(path)) for c in fields[:2])
        if source == target:
            raise FormatError("unary rule source equals target", lineno, str(path))
        tables.add_unary(source, target, _kind(fields[2], lineno, str(path)), _count(fields[3], lineno, str(path)))

    path = directory / "roots.txt"
    for lineno, fields in _records(path):
        tables.add_root(_check_cat(fields[0].strip(), registry, lineno, str(path)))
    return tables


def write_tables(tables: GrammarTables, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f"{cat}\t{n}" for cat, n in sorted(tables.category_counts.items())]
    for word in sorted(tables.lexicon):
        for cat, n in sorted(tables.lexicon[word].items()):
            lines.append(f"{word}\t{cat}\t{n}")
    _write(directory / "lexicon.txt", lines)
    lines = []
    for (left, right) in sorted(tables.binary):
        for (result, kind), n in sorted(tables.binary[(left, right)].items()):
            lines.append(f"{left}\t{right}\t{result}\t{kind.value}\t{n}")
    _write(directory / "binary_rules.txt", lines)
    lines = []
    for source in sorted(tables.unary):
        for (target, kind), n in sorted(tables.unary[source].items()):
            lines.append(f"{source}\t{target}\t{kind.value}\t{n}")
    _write(directory / "unary_rules.txt", lines)
    _write(directory / "roots.txt", sorted(tables.roots))
    if tables.registry != DEFAULT_REGISTRY:
        (directory / "atoms.txt").write_text(tables.registry.to_text())


def _write(path: Path, lines: list) -> None:
    path.write_text("".join(line + "\n" for line in lines))
