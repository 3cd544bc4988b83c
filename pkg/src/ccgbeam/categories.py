"""CCG categories: textual syntax, canonical printing and feature unification.

A category is either an :class:`Atomic` (``NP``, ``S[dcl]``) or a
:class:`Complex` functor ``result/argument`` or ``result\\argument``.
Values are immutable and compare by their canonical string, which is
injective, so equality is structural equality with features.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Union

from .errors import FormatError

FORWARD = "/"
BACKWARD = "\\"
SLASHES = (FORWARD, BACKWARD)


@dataclass(frozen=True)
class AtomRegistry:
    """Which atom names exist, which of them take features, and the feature inventory."""

    names: frozenset = frozenset(
        {"S", "N", "NP", "PP", "conj", "comma", "period", "colon", "semicolon", "LRB", "RRB"}
    )
    feature_bearing: frozenset = frozenset({"S", "N", "NP"})
    features: tuple = (
        "dcl", "b", "ng", "pt", "pss", "to", "adj", "q", "wq", "qem", "em",
        "inv", "frg", "intj", "bem", "nb", "num", "for", "poss", "thr", "expl", "asup",
    )
    variables: frozenset = frozenset({"X"})
    # atoms treated as absorbable punctuation by treebank-binary rules
    punctuation: frozenset = frozenset(
        {"conj", "comma", "period", "colon", "semicolon", "LRB", "RRB"}
    )
    # atoms whose unspecified feature becomes the variable inside modifiers and type-raised functors
    lift_atoms: frozenset = frozenset({"S"})

    @property
    def variable(self) -> str:
        return sorted(self.variables)[0]

    @classmethod
    def from_text(cls, text: str) -> "AtomRegistry":
        """Read ``key value value ...`` lines; keys not given keep their defaults."""
        keys = {
            "atoms": "names",
            "feature-bearing": "feature_bearing",
            "features": "features",
            "variables": "variables",
            "punctuation": "punctuation",
            "lift": "lift_atoms",
        }
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, *rest = line.split()
            if key not in keys:
                raise FormatError(f"unknown registry key {key!r}", lineno)
            attr = keys[key]
            values[attr] = tuple(rest) if attr == "features" else frozenset(rest)
        names = values.get("names", cls.names)
        for attr in ("feature_bearing", "punctuation", "lift_atoms"):
            if attr in values:
                unknown = values[attr] - names
                if unknown:
                    raise FormatError(f"registry refers to unknown atoms {sorted(unknown)}")
            else:
                # defaults only cover the atoms this registry actually has
                values[attr] = getattr(cls, attr) & names
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> "AtomRegistry":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "\n".join(
            [
                "atoms " + " ".join(sorted(self.names)),
                "feature-bearing " + " ".join(sorted(self.feature_bearing)),
                "features " + " ".join(self.features),
                "variables " + " ".join(sorted(self.variables)),
                "punctuation " + " ".join(sorted(self.punctuation)),
                "lift " + " ".join(sorted(self.lift_atoms)),
            ]
        ) + "\n"


DEFAULT_REGISTRY = AtomRegistry()


class _CategoryBase:
    __slots__ = ()

    def __str__(self) -> str:
        return self._text

    def __repr__(self) -> str:
        return f"Category({self._text!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, _CategoryBase) and self._text == other._text

    def __ne__(self, other) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other) -> bool:
        return self._text < other._text


@dataclass(frozen=True, eq=False, repr=False)
class Atomic(_CategoryBase):
    name: str
    feature: str | None = None
    _text: str = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        text = self.name if self.feature is None else f"{self.name}[{self.feature}]"
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash(text))

    @property
    def is_complex(self) -> bool:
        return False

    @property
    def size(self) -> int:
        return 1


@dataclass(frozen=True, eq=False, repr=False)
class Complex(_CategoryBase):
    result: "Category"
    slash: str
    argument: "Category"
    _text: str = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)
    _size: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.slash not in SLASHES:
            raise ValueError(f"bad slash {self.slash!r}")
        text = f"{_bracket(self.result)}{self.slash}{_bracket(self.argument)}"
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash(text))
        object.__setattr__(self, "_size", 1 + self.result.size + self.argument.size)

    @property
    def is_complex(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return self._size


Category = Union[Atomic, Complex]


def _bracket(cat: Category) -> str:
    return f"({cat._text})" if cat.is_complex else cat._text


def print_category(cat: Category) -> str:
    """Canonical string: only the outermost brackets are dropped."""
    return cat._text


# ---------------------------------------------------------------------------
# parsing


@dataclass
class NodeAnnotation:
    """Markedup decorations on one category node (preorder position)."""

    slot: int | None = None
    var: str | None = None
    star: bool = False

    @property
    def empty(self) -> bool:
        return self.slot is None and self.var is None and not self.star


class _PNode:
    __slots__ = ("cat", "ann", "left", "right")

    def __init__(self, cat, ann=None, left=None, right=None):
        self.cat = cat
        self.ann = ann or NodeAnnotation()
        self.left = left
        self.right = right

    def preorder(self) -> Iterator["_PNode"]:
        yield self
        if self.left is not None:
            yield from self.left.preorder()
            yield from self.right.preorder()


class _Parser:
    def __init__(self, text: str, registry: AtomRegistry, annotated: bool):
        self.text = text
        self.pos = 0
        self.registry = registry
        self.annotated = annotated

    def error(self, message: str) -> FormatError:
        return FormatError(f"{message} at offset {self.pos} in category {self.text!r}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> _PNode:
        if not self.text:
            raise FormatError("empty category string")
        node = self.expr()
        if self.pos != len(self.text):
            if self.peek() == ")":
                raise self.error("unbalanced ')'")
            raise self.error(f"unexpected character {self.peek()!r}")
        return node

    def expr(self) -> _PNode:
        node = self.primary()
        while self.peek() in SLASHES and self.peek():
            slash = self.peek()
            self.pos += 1
            right = self.primary()
            node = _PNode(Complex(node.cat, slash, right.cat), None, node, right)
        return node

    def primary(self) -> _PNode:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                raise self.error("missing ')'")
            self.pos += 1
        elif ch.isalpha():
            node = _PNode(self.atom())
        elif not ch:
            raise self.error("unexpected end of category")
        else:
            raise self.error(f"unexpected character {ch!r}")
        if self.annotated:
            self.annotations(node.ann)
        return node

    def word(self, extra: str = "") -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in extra):
            self.pos += 1
        return self.text[start:self.pos]

    def atom(self) -> Atomic:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        name = self.text[start:self.pos]
        if name not in self.registry.names:
            self.pos = start
            raise self.error(f"unknown atomic category {name!r}")
        feature = None
        if self.peek() == "[":
            self.pos += 1
            feature = self.word()
            if not feature or self.peek() != "]":
                raise self.error("malformed feature")
            self.pos += 1
            if name not in self.registry.feature_bearing:
                raise self.error(f"atom {name!r} cannot carry a feature")
            if feature not in self.registry.features and feature not in self.registry.variables:
                raise self.error(f"unknown feature {feature!r}")
        return Atomic(name, feature)

    def annotations(self, ann: NodeAnnotation) -> None:
        while self.peek() in ("{", ":") and self.peek():
            if self.peek() == "{":
                self.pos += 1
                body = self.word("_*")
                if self.peek() != "}" or not body:
                    raise self.error("malformed '{...}' annotation")
                self.pos += 1
                if body.isdigit():
                    self._set_slot(ann, int(body))
                else:
                    self._set_var(ann, body)
            else:
                self.pos += 1
                body = self.word("_*")
                if not body:
                    raise self.error("missing variable after ':'")
                self._set_var(ann, body)

    def _set_slot(self, ann: NodeAnnotation, slot: int) -> None:
        if ann.slot is not None:
            raise self.error("two slot numbers on one node")
        if slot < 1:
            raise self.error("slot numbers start at 1")
        ann.slot = slot

    def _set_var(self, ann: NodeAnnotation, body: str) -> None:
        star = body.endswith("*")
        name = body.rstrip("*")
        if not name or "*" in name or not (name == "_" or name.isalpha()):
            raise self.error(f"bad head variable {body!r}")
        if ann.var is not None and ann.var != name:
            raise self.error("two head variables on one node")
        ann.var = name
        ann.star = ann.star or star


@lru_cache(maxsize=65536)
def _parse_cached(text: str, registry: AtomRegistry) -> Category:
    return _Parser(text, registry, annotated=False).parse().cat


def parse_category(text: str, registry: AtomRegistry = DEFAULT_REGISTRY) -> Category:
    """Parse a category string such as ``(S[dcl]\\NP)/NP``.

    Raises :class:`FormatError` for malformed brackets, unknown atoms and
    features on atoms that cannot carry one.
    """
    return _parse_cached(text, registry)


def parse_annotated(
    text: str, registry: AtomRegistry = DEFAULT_REGISTRY
) -> tuple[Category, list[NodeAnnotation]]:
    """Parse a markedup category; annotations are returned in preorder."""
    root = _Parser(text, registry, annotated=True).parse()
    return root.cat, [node.ann for node in root.preorder()]


# ---------------------------------------------------------------------------
# structure helpers


def preorder(cat: Category) -> Iterator[Category]:
    """Yield every node: self, then the result subtree, then the argument subtree."""
    yield cat
    if cat.is_complex:
        yield from preorder(cat.result)
        yield from preorder(cat.argument)


def map_features(cat: Category, fn) -> Category:
    if cat.is_complex:
        res = map_features(cat.result, fn)
        arg = map_features(cat.argument, fn)
        if res is cat.result and arg is cat.argument:
            return cat
        return Complex(res, cat.slash, arg)
    new = fn(cat)
    if new == cat.feature:
        return cat
    return Atomic(cat.name, new)


@lru_cache(maxsize=65536)
def strip_features(cat: Category) -> Category:
    return map_features(cat, lambda atom: None)


def erase_variables(cat: Category, registry: AtomRegistry = DEFAULT_REGISTRY) -> Category:
    """Drop variable features (``S[X]`` -> ``S``)."""
    return map_features(cat, lambda a: None if a.feature in registry.variables else a.feature)


def lift_features(cat: Category, registry: AtomRegistry = DEFAULT_REGISTRY) -> Category:
    """Give every unspecified lift atom (``S`` by default) the variable feature."""
    var = registry.variable
    return map_features(
        cat,
        lambda a: var if a.feature is None and a.name in registry.lift_atoms else a.feature,
    )


def has_variable(cat: Category, registry: AtomRegistry = DEFAULT_REGISTRY) -> bool:
    return any(
        not node.is_complex and node.feature in registry.variables for node in preorder(cat)
    )


def is_modifier(cat: Category) -> bool:
    """``X|X`` once features are ignored."""
    return cat.is_complex and strip_features(cat.result) == strip_features(cat.argument)


def is_type_raised(cat: Category) -> bool:
    """``T|(T|A)`` once features are ignored."""
    return (
        cat.is_complex
        and cat.argument.is_complex
        and cat.argument.slash != cat.slash
        and strip_features(cat.argument.result) == strip_features(cat.result)
    )


# ---------------------------------------------------------------------------
# unification


@dataclass(frozen=True)
class FeatureBinding:
    """Instantiation of variable features produced by :func:`unify`."""

    pairs: tuple = ()

    @classmethod
    def of(cls, mapping: dict) -> "FeatureBinding":
        return cls(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def apply(self, cat: Category) -> Category:
        if not self.pairs:
            return cat
        mapping = dict(self.pairs)
        return map_features(cat, lambda a: mapping.get(a.feature, a.feature))


def _unify_feature(fa, fb, variables, binding):
    """Unify two atom features; returns (ok, feature)."""
    if fa == fb:
        return True, fa
    if fa is None:
        return True, fb
    if fb is None:
        return True, fa
    a_var, b_var = fa in variables, fb in variables
    if a_var and b_var:
        return True, fa
    if a_var or b_var:
        var, concrete = (fa, fb) if a_var else (fb, fa)
        bound = binding.get(var)
        if bound is not None and bound != concrete:
            return False, None
        binding[var] = concrete
        return True, concrete
    return False, None


def _unify(a: Category, b: Category, variables, binding) -> Category | None:
    if a.is_complex != b.is_complex:
        return None
    if a.is_complex:
        if a.slash != b.slash:
            return None
        res = _unify(a.result, b.result, variables, binding)
        if res is None:
            return None
        arg = _unify(a.argument, b.argument, variables, binding)
        if arg is None:
            return None
        return Complex(res, a.slash, arg)
    if a.name != b.name:
        return None
    ok, feature = _unify_feature(a.feature, b.feature, variables, binding)
    if not ok:
        return None
    return Atomic(a.name, feature)


def unify(
    a: Category, b: Category, registry: AtomRegistry = DEFAULT_REGISTRY
) -> tuple[Category, FeatureBinding] | None:
    """Unify two categories up to features.

    Equal features match, an unspecified or variable feature matches
    anything, and the result keeps the most specific feature. Returns
    ``None`` on a structural or feature clash.
    """
    if a == b:
        return a, FeatureBinding()
    binding: dict = {}
    res = _unify(a, b, registry.variables, binding)
    if res is None:
        return None
    fb = FeatureBinding.of(binding)
    return fb.apply(res), fb
