"""Pruning supertag distributions into candidate category sets.

Tag files hold one token per line, ``index<TAB>word<TAB>cat:logprob cat:logprob``,
with blank lines between sentences. Log-probabilities are natural logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .categories import DEFAULT_REGISTRY, AtomRegistry, parse_category
from .errors import AlignmentError, FormatError

ABSOLUTE = "absolute"
RELATIVE = "relative"
SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TagDistribution:
    index: int
    word: str
    entries: tuple  # (category string, log-probability), best first

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"empty distribution for token {self.index}")
        total = 0.0
        for cat, lp in self.entries:
            if not (math.isfinite(lp) and lp <= SUM_TOLERANCE):
                raise ValueError(f"log-probability {lp} of {cat} is not in (-inf, 0]")
            total += math.exp(lp)
        if total > 1 + SUM_TOLERANCE:
            raise ValueError(f"probabilities for token {self.index} sum to {total:.6f} > 1")
        ordered = tuple(sorted(self.entries, key=lambda e: (-e[1], e[0])))
        object.__setattr__(self, "entries", ordered)

    @classmethod
    def from_probs(cls, index: int, word: str, probs: dict) -> "TagDistribution":
        return cls(index, word, tuple((cat, math.log(p)) for cat, p in probs.items()))

    @property
    def best(self) -> str:
        return self.entries[0][0]


@dataclass(frozen=True)
class PruneConfig:
    gamma: float = 0.0005
    alpha: int = 10
    mode: str = ABSOLUTE

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.mode not in (ABSOLUTE, RELATIVE):
            raise ValueError(f"unknown threshold mode {self.mode!r}")


def prune(dist: TagDistribution, cfg: PruneConfig = PruneConfig()) -> list:
    """Entries above the threshold, capped at ``alpha``; the best entry always survives."""
    cutoff = math.log(cfg.gamma)
    if cfg.mode == RELATIVE:
        cutoff += dist.entries[0][1]
    kept = [e for e in dist.entries if e[1] >= cutoff]
    if not kept:
        kept = [dist.entries[0]]
    return kept[: cfg.alpha]


def ambiguity_and_accuracy(sentences, gold, cfg: PruneConfig = PruneConfig()) -> tuple[float, float]:
    """Mean pruned-set size and fraction of tokens whose set holds the gold category.

    ``sentences`` is a list of token distributions per sentence and ``gold``
    the matching lists of gold category strings.
    """
    if len(sentences) != len(gold):
        raise AlignmentError(f"{len(sentences)} sentences of distributions, {len(gold)} of gold categories")
    tokens = size = hits = 0
    for dists, cats in zip(sentences, gold):
        if len(dists) != len(cats):
            raise AlignmentError(f"{len(dists)} distributions for {len(cats)} gold categories")
        for dist, cat in zip(dists, cats):
            kept = prune(dist, cfg)
            tokens += 1
            size += len(kept)
            hits += any(c == cat for c, _ in kept)
    if tokens == 0:
        return 0.0, 0.0
    return size / tokens, hits / tokens


def format_tag_sentence(dists) -> str:
    lines = []
    for d in dists:
        cats = " ".join(f"{cat}:{lp!r}" for cat, lp in d.entries)
        lines.append(f"{d.index}\t{d.word}\t{cats}")
    return "".join(line + "\n" for line in lines)


def write_tag_file(sentences) -> str:
    return "\n".join(format_tag_sentence(s) for s in sentences)


def load_tag_file(
    text: str, registry: AtomRegistry | None = DEFAULT_REGISTRY, source: str | None = None
) -> list[list[TagDistribution]]:
    sentences, current = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        if raw.lstrip().startswith("#"):
            continue
        fields = raw.split("\t")
        if len(fields) != 3:
            raise FormatError("expected 'index<TAB>word<TAB>cat:logprob ...'", lineno, source)
        try:
            index = int(fields[0])
        except ValueError:
            raise FormatError(f"bad token index {fields[0]!r}", lineno, source) from None
        if index != len(current):
            raise FormatError(f"token index {index}, expected {len(current)}", lineno, source)
        entries = []
        for item in fields[2].split():
            cat, sep, value = item.rpartition(":")
            if not sep or not cat:
                raise FormatError(f"expected cat:logprob, got {item!r}", lineno, source)
            try:
                lp = float(value)
            except ValueError:
                raise FormatError(f"non-numeric log-probability {value!r}", lineno, source) from None
            if registry is not None:
                try:
                    parse_category(cat, registry)
                except FormatError as exc:
                    raise FormatError(str(exc), lineno, source) from None
            entries.append((cat, lp))
        try:
            current.append(TagDistribution(index, fields[1], tuple(entries)))
        except ValueError as exc:
            raise FormatError(str(exc), lineno, source) from None
    if current:
        sentences.append(current)
    return sentences


def read_tag_file(path: str | Path, registry: AtomRegistry | None = DEFAULT_REGISTRY) -> list[list[TagDistribution]]:
    path = Path(path)
    return load_tag_file(path.read_text(), registry, str(path))
