"""Head variables and dependency filling during rule application.

Every chart item carries a :class:`HeadState`: one head variable per node of
its category (preorder), the word indices bound to each variable, and the
dependency slots still waiting for a filler. Combining two items unifies the
variables of the cancelled category nodes; a slot whose variable acquires
fillers emits one :class:`Dependency` per filler.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .categories import DEFAULT_REGISTRY, AtomRegistry, Category, strip_features, unify
from .grammar import RuleKind
from .markedup import SELF, AnnotatedCategory


class Dependency(NamedTuple):
    head: int
    category: str
    slot: int
    arg: int
    long_range: bool = False

    def key(self) -> tuple:
        return (self.head, self.category, self.slot, self.arg)


class Pending(NamedTuple):
    head: int
    category: str
    slot: int
    var: int
    long_range: bool = False


@dataclass(frozen=True)
class HeadState:
    vars: tuple
    fillers: tuple
    pending: tuple = ()
    starred: frozenset = frozenset()

    @property
    def heads(self) -> frozenset:
        return self.fillers[self.vars[0]]


def lexical_state(entry: AnnotatedCategory, index: int, category: str | None = None) -> HeadState:
    """Head state of a word carrying the annotated lexical category."""
    category = str(entry.category) if category is None else category
    ids: dict = {}
    vars_ = tuple(ids.setdefault(name, len(ids)) for name in entry.vars)
    fillers = [frozenset()] * len(ids)
    if SELF in ids:
        fillers[ids[SELF]] = frozenset({index})
    pending = tuple(
        Pending(index, category, slot, vars_[pos])
        for pos, slot in enumerate(entry.slots)
        if slot is not None and entry.vars[pos] != SELF
    )
    starred = frozenset(vars_[pos] for pos, star in enumerate(entry.stars) if star)
    return HeadState(vars_, tuple(fillers), tuple(sorted(pending)), starred)


class _Merge:
    """Union-find over the variables of one or two head states."""

    def __init__(self, first: HeadState, second: HeadState | None = None):
        self.offset = len(first.fillers)
        self.first = first.vars
        self.fillers = list(first.fillers)
        self.starred = set(first.starred)
        self.pending = [(0, p) for p in first.pending]
        if second is not None:
            off = self.offset
            self.second = tuple(v + off for v in second.vars)
            self.fillers += list(second.fillers)
            self.starred |= {v + off for v in second.starred}
            self.pending += [(1, p._replace(var=p.var + off)) for p in second.pending]
        else:
            self.second = ()
        self.parent = list(range(len(self.fillers)))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def fresh(self) -> int:
        self.parent.append(len(self.parent))
        self.fillers.append(frozenset())
        return len(self.parent) - 1

    def _mark_long_range(self, side: int, var: int) -> None:
        root = self.find(var)
        for i, (origin, p) in enumerate(self.pending):
            if origin == side and not p.long_range and self.find(p.var) == root:
                self.pending[i] = (origin, p._replace(long_range=True))

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if ra in self.starred:
            self._mark_long_range(1, rb)
        if rb in self.starred:
            self._mark_long_range(0, ra)
        self.parent[rb] = ra
        self.fillers[ra] = self.fillers[ra] | self.fillers[rb]
        if rb in self.starred:
            self.starred.add(ra)

    def unify_spans(self, first_pos: int, second_pos: int, size: int) -> None:
        for t in range(size):
            self.union(self.first[first_pos + t], self.second[second_pos + t])

    def finish(self, vars_: list) -> tuple[HeadState, tuple]:
        filled = []
        waiting = []
        for _origin, p in self.pending:
            fill = self.fillers[self.find(p.var)]
            if fill:
                filled.extend(
                    Dependency(p.head, p.category, p.slot, arg, p.long_range)
                    for arg in sorted(fill)
                    if arg != p.head
                )
            else:
                waiting.append(p)
        mapping: dict = {}
        new_vars = tuple(mapping.setdefault(self.find(v), len(mapping)) for v in vars_)
        fillers = [frozenset()] * len(mapping)
        for root, new in mapping.items():
            fillers[new] = self.fillers[root]
        pending = sorted(
            {p._replace(var=mapping[self.find(p.var)]) for p in waiting if self.find(p.var) in mapping}
        )
        starred = frozenset(mapping[r] for r in {self.find(v) for v in self.starred} if r in mapping)
        return HeadState(new_vars, tuple(fillers), tuple(pending), starred), tuple(filled)


def passes_heads(functor: Category, registry: AtomRegistry = DEFAULT_REGISTRY) -> bool:
    """True for modifiers: result and argument unify, so the argument keeps its heads.

    ``(S\\NP)\\(S\\NP)`` and ``N/N`` qualify; ``(S[dcl]\\NP)/(S[b]\\NP)`` does not.
    """
    return functor.is_complex and unify(functor.result, functor.argument, registry) is not None


def _absorbable(cat: Category, registry: AtomRegistry) -> bool:
    return not cat.is_complex and cat.name in registry.punctuation


def propagate_dependencies(
    kind: RuleKind,
    left: Category,
    right: Category,
    result: Category,
    left_state: HeadState,
    right_state: HeadState,
    registry: AtomRegistry = DEFAULT_REGISTRY,
) -> tuple[HeadState, tuple]:
    """Head state of the result and the dependencies filled by this step.

    For the combinator schemata the functor's head becomes the result head,
    except for modifiers (see :func:`passes_heads`) where the argument's heads
    pass through.
    Treebank-binary steps coordinate (both daughters look like the result),
    absorb punctuation, or otherwise keep the non-punctuation daughter's head.
    """
    if kind is RuleKind.TB:
        return _treebank_binary(left, right, result, left_state, right_state, registry)
    if kind in (RuleKind.FA, RuleKind.FC):
        functor, fstate, arg, astate = left, left_state, right, right_state
    else:
        functor, fstate, arg, astate = right, right_state, left, left_state
    merge = _Merge(fstate, astate)
    res_size = functor.result.size
    arg_pos = 1 + res_size
    cancelled_at = 0 if kind in (RuleKind.FA, RuleKind.BA) else 1
    merge.unify_spans(arg_pos, cancelled_at, functor.argument.size)
    if passes_heads(functor, registry):
        vars_ = list(merge.second)
    elif kind in (RuleKind.FA, RuleKind.BA):
        vars_ = list(merge.first[1:1 + res_size])
    else:
        tail = merge.second[1 + arg.result.size:]
        vars_ = [merge.first[1], *merge.first[1:1 + res_size], *tail]
    return merge.finish(vars_)


def _treebank_binary(left, right, result, lstate, rstate, registry):
    sl, sr, sres = strip_features(left), strip_features(right), strip_features(result)
    merge = _Merge(lstate, rstate)
    if sl == sres and sr == sres:
        merge.unify_spans(0, 0, result.size)
        return merge.finish(list(merge.first))
    if _absorbable(left, registry) and sr == sres:
        return rstate, ()
    if _absorbable(right, registry) and sl == sres:
        return lstate, ()
    head = merge.second[0] if _absorbable(left, registry) else merge.first[0]
    vars_ = [head] + [merge.fresh() for _ in range(result.size - 1)]
    return merge.finish(vars_)


def propagate_unary(
    kind: RuleKind, source: Category, target: Category, state: HeadState
) -> HeadState:
    """Head state after type-raising or type-changing; unary steps fill nothing."""
    merge = _Merge(state)
    if kind is RuleKind.TR:
        t = merge.fresh()
        inner = [t] + [merge.fresh() for _ in range(target.result.size - 1)]
        vars_ = [t, *inner, t, *inner, *state.vars]
        vars_ = vars_[: target.size]
        return merge.finish(vars_)[0]
    vars_ = _align(target, source, 0, state.vars, merge)
    vars_[0] = state.vars[0]
    return merge.finish(vars_)[0]


def _align(target: Category, source: Category, pos: int, src_vars: tuple, merge: _Merge) -> list:
    """Reuse source variables wherever target and source have the same shape."""
    if source is not None and target.is_complex == source.is_complex and (
        not target.is_complex or target.slash == source.slash
    ):
        out = [src_vars[pos]]
        if target.is_complex:
            out += _align(target.result, source.result, pos + 1, src_vars, merge)
            out += _align(target.argument, source.argument, pos + 1 + source.result.size, src_vars, merge)
        return out
    return [merge.fresh() for _ in range(target.size)]
