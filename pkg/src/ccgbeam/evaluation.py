"""Labelled dependency evaluation.

Dependency files hold one block per sentence, blocks separated by blank
lines. A block may start with ``# skimmed`` or ``# unanalysed`` and a
``# cats c1 c2 ...`` line with the lexical categories, followed by optional
derivation lines (starting with ``(``) and one dependency per line::

    head<TAB>category<TAB>slot<TAB>arg<TAB>long-range flag (1 or 0)
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .categories import DEFAULT_REGISTRY, AtomRegistry, erase_variables, parse_category
from .errors import AlignmentError, FormatError
from .propagation import Dependency

SKIMMED = "# skimmed"
UNANALYSED = "# unanalysed"
CATS = "# cats"


@dataclass
class SentenceDeps:
    deps: list = field(default_factory=list)
    categories: list | None = None
    skimmed: bool = False
    analysed: bool = True
    derivations: list = field(default_factory=list)


def format_sentence(deps, categories=None, skimmed: bool = False, derivations=(), analysed: bool = True) -> str:
    lines = []
    if not analysed:
        lines.append(UNANALYSED)
    if skimmed:
        lines.append(SKIMMED)
    if categories is not None:
        lines.append(" ".join([CATS, *categories]))
    lines.extend(derivations)
    for d in sorted(deps):
        lines.append(f"{d.head}\t{d.category}\t{d.slot}\t{d.arg}\t{1 if d.long_range else 0}")
    if not lines:
        lines.append("# no dependencies")
    return "".join(line + "\n" for line in lines)


def write_deps(sentences) -> str:
    return "\n".join(
        format_sentence(s.deps, s.categories, s.skimmed, s.derivations, s.analysed) for s in sentences
    )


def _int(text: str, lineno: int, source) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"expected an integer, got {text!r}", lineno, source) from None


def load_deps(text: str, source: str | None = None) -> list[SentenceDeps]:
    sentences = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip():
            if current is not None:
                sentences.append(current)
                current = None
            continue
        if current is None:
            current = SentenceDeps()
        if line.startswith("#"):
            if line.strip() == SKIMMED:
                current.skimmed = True
            elif line.strip() == UNANALYSED:
                current.analysed = False
            elif line.startswith(CATS):
                current.categories = line[len(CATS):].split()
            continue
        if line.startswith("("):
            current.derivations.append(line)
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise FormatError("expected 5 tab-separated dependency fields", lineno, source)
        flag = fields[4].strip()
        if flag not in ("0", "1"):
            raise FormatError(f"long-range flag must be 0 or 1, got {flag!r}", lineno, source)
        current.deps.append(
            Dependency(_int(fields[0], lineno, source), fields[1], _int(fields[2], lineno, source),
                       _int(fields[3], lineno, source), flag == "1")
        )
    if current is not None:
        sentences.append(current)
    return sentences


def read_deps(path: str | Path) -> list[SentenceDeps]:
    path = Path(path)
    return load_deps(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# scoring


def canonical_category(text: str, registry: AtomRegistry = DEFAULT_REGISTRY) -> str:
    """Category string with variable features erased, e.g. ``S[X]`` becomes ``S``."""
    try:
        return str(erase_variables(parse_category(text, registry), registry))
    except FormatError:
        return text


def _quads(deps, registry) -> Counter:
    return Counter((d.head, canonical_category(d.category, registry), d.slot, d.arg) for d in deps)


def _pct(num: float, den: float) -> float:
    return 100.0 * num / den if den else 0.0


def f_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass
class RelationRow:
    category: str
    slot: int
    relation: str
    gold: int
    test: int
    matched: int

    @property
    def precision(self) -> float:
        return _pct(self.matched, self.test)

    @property
    def recall(self) -> float:
        return _pct(self.matched, self.gold)

    @property
    def f(self) -> float:
        return f_score(self.precision, self.recall)


@dataclass
class EvalReport:
    sentences: int
    gold_total: int
    test_total: int
    matched: int
    tokens: int
    correct_tags: int
    analysed: int
    correct_sentences: int
    skimmed: int = 0
    rows: list = field(default_factory=list)

    @property
    def precision(self) -> float:
        return _pct(self.matched, self.test_total)

    @property
    def recall(self) -> float:
        return _pct(self.matched, self.gold_total)

    @property
    def f(self) -> float:
        return f_score(self.precision, self.recall)

    @property
    def category_accuracy(self) -> float:
        return _pct(self.correct_tags, self.tokens)

    @property
    def coverage(self) -> float:
        return _pct(self.analysed, self.sentences)

    @property
    def sentence_accuracy(self) -> float:
        return _pct(self.correct_sentences, self.sentences)

    def to_text(self, per_relation: bool = False) -> str:
        lines = [
            f"{'P':>7} {'R':>7} {'F':>7} {'Cat':>7} {'Cov.':>7} {'Sent':>7}",
            f"{self.precision:7.1f} {self.recall:7.1f} {self.f:7.1f} "
            f"{self.category_accuracy:7.1f} {self.coverage:7.1f} {self.sentence_accuracy:7.1f}",
            f"sentences {self.sentences}  skimmed {self.skimmed}  "
            f"gold deps {self.gold_total}  test deps {self.test_total}  matched {self.matched}",
        ]
        if per_relation:
            lines.append("")
            lines.append(f"{'Lexical category':<36} {'Slot':>4}  {'Relation':<24} {'#Deps':>6} {'F':>6}")
            for row in self.rows:
                lines.append(
                    f"{row.category:<36} {row.slot:>4}  {row.relation:<24} {row.gold:>6} {row.f:6.1f}"
                )
        return "\n".join(lines) + "\n"


def per_relation(gold, test, markedup=None, registry: AtomRegistry = DEFAULT_REGISTRY) -> list[RelationRow]:
    """One row per (category, slot) seen in gold or test, gold-frequent first."""
    gold_by: Counter = Counter()
    test_by: Counter = Counter()
    match_by: Counter = Counter()
    for g, t in zip(gold, test):
        gq, tq = _quads(g.deps, registry), _quads(t.deps, registry)
        for quad, n in gq.items():
            gold_by[(quad[1], quad[2])] += n
        for quad, n in tq.items():
            test_by[(quad[1], quad[2])] += n
        for quad, n in (gq & tq).items():
            match_by[(quad[1], quad[2])] += n
    rows = []
    for key in set(gold_by) | set(test_by):
        name = ""
        if markedup is not None:
            name = markedup.relation(key[0], key[1]) or ""
        rows.append(RelationRow(key[0], key[1], name, gold_by[key], test_by[key], match_by[key]))
    rows.sort(key=lambda r: (-r.gold, r.category, r.slot))
    return rows


def evaluate(gold, test, markedup=None, registry: AtomRegistry = DEFAULT_REGISTRY) -> EvalReport:
    """Compare parsed sentences against gold, both lists of :class:`SentenceDeps`."""
    if len(gold) != len(test):
        raise AlignmentError(f"gold has {len(gold)} sentences, test has {len(test)}")
    report = EvalReport(len(gold), 0, 0, 0, 0, 0, 0, 0)
    for i, (g, t) in enumerate(zip(gold, test)):
        gq, tq = _quads(g.deps, registry), _quads(t.deps, registry)
        report.gold_total += sum(gq.values())
        report.test_total += sum(tq.values())
        report.matched += sum((gq & tq).values())
        report.analysed += t.analysed
        report.skimmed += t.skimmed
        report.correct_sentences += t.analysed and gq == tq
        if g.categories is not None:
            report.tokens += len(g.categories)
            if t.analysed and t.categories is not None:
                if len(t.categories) != len(g.categories):
                    raise AlignmentError(
                        f"sentence {i + 1}: {len(g.categories)} gold tokens, {len(t.categories)} test tokens"
                    )
                report.correct_tags += sum(
                    canonical_category(a, registry) == canonical_category(b, registry)
                    for a, b in zip(g.categories, t.categories)
                )
    report.rows = per_relation(gold, test, markedup, registry)
    return report
