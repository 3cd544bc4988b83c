"""Exception types shared across the engine."""

from __future__ import annotations


class CCGError(Exception):
    """Base class for all engine errors."""


class FormatError(CCGError, ValueError):
    """Malformed input text (categories, files, annotations)."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class AlignmentError(CCGError):
    """Parallel inputs (tags, spans, gold) disagree in sentence or token counts."""


class BudgetExceeded(CCGError):
    """An exhaustive enumeration ran past its item budget."""
