"""Grammar-constrained CCG parsing with a chart-based beam-search decoder."""

__version__ = "0.1.0"
