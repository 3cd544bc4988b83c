"""Additive derivation scores.

A derivation scores ``w_st * (sum of lexical log-probabilities)`` plus
``w_sp * (sum of span-label scores)``, one span label per internal node.
A run of unary rules over one span counts as a single node whose label is
the chain of categories joined with ``|`` (bottom first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .categories import DEFAULT_REGISTRY, AtomRegistry, parse_category
from .errors import FormatError

CHAIN_SEPARATOR = "|"


def encode_chain(categories) -> str:
    parts = [str(c) for c in categories]
    if len(parts) < 2:
        raise ValueError("a unary chain needs at least two categories")
    if any(CHAIN_SEPARATOR in p for p in parts):
        raise ValueError("category strings cannot contain the chain separator")
    return CHAIN_SEPARATOR.join(parts)


def decode_chain(label: str) -> list[str]:
    return label.split(CHAIN_SEPARATOR)


@dataclass(frozen=True)
class ScoreConfig:
    w_st: float = 1.0
    w_sp: float = 1.0
    missing: float = -1e4

    def __post_init__(self):
        for name in ("w_st", "w_sp", "missing"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def scaled(self, factor: float) -> "ScoreConfig":
        return ScoreConfig(self.w_st * factor, self.w_sp * factor, self.missing)


@dataclass
class ScoreChart:
    """Span-label scores for one sentence, keyed by (start, end, label)."""

    n: int | None = None
    entries: dict = field(default_factory=dict)

    def get(self, start: int, end: int, label: str) -> float | None:
        return self.entries.get((start, end, label))

    def add(self, start: int, end: int, label: str, score: float) -> None:
        if self.n is not None and not 0 <= start < end <= self.n:
            raise ValueError(f"span ({start},{end}) outside sentence of length {self.n}")
        key = (start, end, label)
        if key in self.entries:
            raise ValueError(f"duplicate score for {key}")
        self.entries[key] = score

    def to_text(self) -> str:
        lines = [f"n {self.n if self.n is not None else 0}"]
        for (start, end, label), score in sorted(self.entries.items()):
            lines.append(f"{start} {end} {label} {score!r}")
        return "\n".join(lines) + "\n"


def _parse_block(lines, registry, source):
    chart = ScoreChart()
    for lineno, raw in lines:
        fields = raw.split()
        if fields[0] == "n":
            if chart.n is not None or chart.entries or len(fields) != 2:
                raise FormatError("misplaced or malformed 'n' header", lineno, source)
            try:
                chart.n = int(fields[1])
            except ValueError:
                raise FormatError(f"bad sentence length {fields[1]!r}", lineno, source) from None
            continue
        if chart.n is None:
            raise FormatError("score chart missing 'n <length>' header", lineno, source)
        if len(fields) != 4:
            raise FormatError("expected 'start end label score'", lineno, source)
        try:
            start, end = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError("span bounds must be integers", lineno, source) from None
        try:
            score = float(fields[3])
        except ValueError:
            raise FormatError(f"non-numeric score {fields[3]!r}", lineno, source) from None
        if not 0 <= start < end <= chart.n:
            raise FormatError(f"bad span ({start},{end}) for length {chart.n}", lineno, source)
        if registry is not None:
            for part in decode_chain(fields[2]):
                try:
                    parse_category(part, registry)
                except FormatError as exc:
                    raise FormatError(str(exc), lineno, source) from None
        key = (start, end, fields[2])
        if key in chart.entries:
            raise FormatError(f"duplicate entry for span ({start},{end}) label {fields[2]}", lineno, source)
        chart.entries[key] = score
    return chart


def _blocks(text: str):
    block = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            if block:
                yield block
                block = []
            continue
        if raw.lstrip().startswith("#"):
            continue
        block.append((lineno, raw))
    if block:
        yield block


def load_score_chart(
    text: str, registry: AtomRegistry | None = DEFAULT_REGISTRY, source: str | None = None
) -> ScoreChart:
    """Parse a single-sentence chart; empty text gives an empty chart."""
    blocks = list(_blocks(text))
    if not blocks:
        return ScoreChart()
    if len(blocks) > 1:
        raise FormatError("more than one sentence in score chart text", blocks[1][0][0], source)
    return _parse_block(blocks[0], registry, source)


def load_score_charts(
    text: str, registry: AtomRegistry | None = DEFAULT_REGISTRY, source: str | None = None
) -> list[ScoreChart]:
    return [_parse_block(b, registry, source) for b in _blocks(text)]


def read_score_charts(path: str | Path, registry: AtomRegistry | None = DEFAULT_REGISTRY) -> list[ScoreChart]:
    path = Path(path)
    return load_score_charts(path.read_text(), registry, source=str(path))


def write_score_charts(charts) -> str:
    return "\n".join(c.to_text() for c in charts)


class FrequencyScorer:
    """Span-independent label scores ``log(count / total)`` from rule counts.

    Chain labels are scored by their top category. Unseen labels return
    ``None`` so the caller applies the missing-label default.
    """

    def __init__(self, tables):
        self.counts = tables.label_counts()
        self.total = sum(self.counts.values())

    def get(self, start: int, end: int, label: str) -> float | None:
        top = decode_chain(label)[-1]
        count = self.counts.get(top)
        if not count:
            return None
        return math.log(count / self.total)


def span_score(scorer, start: int, end: int, label: str, cfg: ScoreConfig) -> float:
    value = scorer.get(start, end, label) if scorer is not None else None
    return cfg.w_sp * (cfg.missing if value is None else value)


def score_derivation(item, scorer, cfg: ScoreConfig) -> float:
    """Recompute a derivation's score from scratch as a flat sum over nodes."""
    total = 0.0
    stack = [(item, False)]
    while stack:
        node, under_unary = stack.pop()
        if node.is_leaf:
            total += cfg.w_st * node.logprob
            continue
        if not under_unary:
            chain = [str(node.cat)]
            below = node
            while below.kind is not None and below.kind.unary:
                below = below.children[0]
                chain.append(str(below.cat))
            label = str(node.cat) if len(chain) == 1 else CHAIN_SEPARATOR.join(reversed(chain))
            total += span_score(scorer, node.start, node.end, label, cfg)
        unary = node.kind.unary
        for child in node.children:
            stack.append((child, unary))
    return total
