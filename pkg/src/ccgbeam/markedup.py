"""Markedup entries: which argument slots of a lexical category create
dependencies, and how head variables are shared between category nodes.

File format, one entry per line::

    (S[dcl]\\NP{1}:Y)/NP{2}:Z<TAB>transitive verb<TAB>transitive verb

``{n}`` after a node numbers a dependency slot, ``:V`` or ``{V}`` names the
node's head variable and a trailing ``*`` on a variable marks fillers bound
through it as long-range. The root is headed by the word itself (``_``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .categories import (
    DEFAULT_REGISTRY,
    AtomRegistry,
    Category,
    parse_annotated,
    parse_category,
)
from .errors import FormatError

SELF = "_"


@dataclass(frozen=True)
class AnnotatedCategory:
    """A lexical category with one head variable, optional slot and star flag per node.

    All tuples are indexed by preorder node position (node, result subtree,
    argument subtree).
    """

    category: Category
    vars: tuple
    slots: tuple
    stars: tuple

    @property
    def slot_numbers(self) -> list[int]:
        return sorted(s for s in self.slots if s is not None)

    def slot_position(self, slot: int) -> int:
        return self.slots.index(slot)

    def __str__(self) -> str:
        return render_annotated(self)


def spine_positions(cat: Category) -> list[int]:
    """Preorder positions of the root, its result, the result's result, ..."""
    positions = [0]
    node = cat
    while node.is_complex:
        positions.append(positions[-1] + 1)
        node = node.result
    return positions


def _validate(cat: Category, vars_: list, slots: list, stars: list, text: str) -> None:
    spine = set(spine_positions(cat))
    numbers = [s for s in slots if s is not None]
    if len(set(numbers)) != len(numbers):
        raise FormatError(f"duplicate slot number in {text!r}")
    if sorted(numbers) != list(range(1, len(numbers) + 1)):
        raise FormatError(f"slots must be numbered contiguously from 1 in {text!r}")
    for pos, slot in enumerate(slots):
        if slot is not None and pos in spine:
            raise FormatError(f"slot {slot} sits on a head node of {text!r}; slots go on arguments")
    starred_only = {}
    for var, star in zip(vars_, stars):
        if var is None:
            continue
        starred_only[var] = starred_only.get(var, True) and star
    dangling = sorted(v for v, only in starred_only.items() if only)
    if dangling:
        raise FormatError(f"dangling head variable(s) {dangling} in {text!r}")


def annotate(text: str, registry: AtomRegistry = DEFAULT_REGISTRY) -> AnnotatedCategory:
    """Build an :class:`AnnotatedCategory` from annotated category text."""
    cat, anns = parse_annotated(text, registry)
    vars_ = [a.var for a in anns]
    slots = [a.slot for a in anns]
    stars = [a.star for a in anns]
    _validate(cat, vars_, slots, stars, text)
    spine = set(spine_positions(cat))
    resolved = []
    for pos, var in enumerate(vars_):
        if var is None:
            var = SELF if pos in spine else f"#{pos}"
        resolved.append(var)
    return AnnotatedCategory(cat, tuple(resolved), tuple(slots), tuple(stars))


def default_annotation(cat: Category) -> AnnotatedCategory:
    """Fallback annotation for categories missing from the markedup file.

    The functor's spine arguments get slots numbered in textual order; once
    the spine reaches a modifier ``X|X`` the mirrored result gets no slots.
    Head nodes take the word itself, every other node a fresh variable.
    """
    arg_positions = []
    node, p = cat, 0
    while node.is_complex:
        arg_positions.append(p + 1 + node.result.size)
        if node.result == node.argument:
            break
        node, p = node.result, p + 1
    slots = [None] * cat.size
    for number, position in enumerate(sorted(arg_positions), 1):
        slots[position] = number
    spine = set(spine_positions(cat))
    vars_ = tuple(SELF if p in spine else f"#{p}" for p in range(cat.size))
    return AnnotatedCategory(cat, vars_, tuple(slots), (False,) * cat.size)


def render_annotated(entry: AnnotatedCategory) -> str:
    """Print an entry back in markedup syntax (fresh variables omitted)."""

    def walk(cat: Category, pos: int, top: bool) -> tuple[str, int]:
        if cat.is_complex:
            left, nxt = walk(cat.result, pos + 1, False)
            right, nxt = walk(cat.argument, nxt, False)
            text = f"{left}{cat.slash}{right}"
            if not top:
                text = f"({text})"
        else:
            text, nxt = str(cat), pos + 1
        slot, var, star = entry.slots[pos], entry.vars[pos], entry.stars[pos]
        if slot is not None:
            text += f"{{{slot}}}"
        if not var.startswith("#") and not (var == SELF and not star):
            text += f":{var}{'*' if star else ''}"
        return text, nxt

    return walk(entry.category, 0, True)[0]


@dataclass
class MarkedupTable:
    entries: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    registry: AtomRegistry = DEFAULT_REGISTRY
    _defaults: dict = field(default_factory=dict, repr=False)

    def __contains__(self, cat) -> bool:
        return str(cat) in self.entries

    def resolve(self, cat) -> AnnotatedCategory:
        """Entry for a lexical category, falling back to :func:`default_annotation`."""
        key = str(cat)
        entry = self.entries.get(key)
        if entry is not None:
            return entry
        entry = self._defaults.get(key)
        if entry is None:
            if not hasattr(cat, "is_complex"):
                cat = parse_category(cat, self.registry)
            entry = default_annotation(cat)
            self._defaults[key] = entry
        return entry

    def relation(self, cat, slot: int) -> str | None:
        return self.relations.get((str(cat), slot))

    def to_text(self) -> str:
        lines = []
        for key in sorted(self.entries):
            entry = self.entries[key]
            names = [self.relations.get((key, s), "") for s in entry.slot_numbers]
            while names and not names[-1]:
                names.pop()
            lines.append("\t".join([render_annotated(entry), *names]))
        return "\n".join(lines) + ("\n" if lines else "")


def load_markedup(
    text: str, registry: AtomRegistry = DEFAULT_REGISTRY, source: str | None = None
) -> MarkedupTable:
    """Parse markedup text; errors carry the offending line number."""
    table = MarkedupTable(registry=registry)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        try:
            entry = annotate(fields[0].strip(), registry)
        except FormatError as exc:
            raise FormatError(str(exc), lineno, source) from None
        key = str(entry.category)
        if key in table.entries:
            raise FormatError(f"duplicate markedup entry for {key}", lineno, source)
        table.entries[key] = entry
        names = [f.strip() for f in fields[1:]]
        if len(names) > len(entry.slot_numbers):
            raise FormatError(f"{len(names)} relation names for {len(entry.slot_numbers)} slots", lineno, source)
        for slot, name in enumerate(names, 1):
            if name:
                table.relations[(key, slot)] = name
    return table


def read_markedup(path: str | Path, registry: AtomRegistry = DEFAULT_REGISTRY) -> MarkedupTable:
    path = Path(path)
    return load_markedup(path.read_text(), registry, source=str(path))
