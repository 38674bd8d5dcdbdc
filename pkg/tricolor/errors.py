"""
Exception hierarchy shared by every tricolor module.
"""

from __future__ import annotations

from typing import Iterable


class TricolorError(Exception):
    """Base class for all errors raised by tricolor."""


class ContractViolation(TricolorError, ValueError):
    """A caller broke an operation's precondition (length mismatch, bad config...)."""


class ConfigError(TricolorError):
    """An environment setting could not be interpreted."""


class DimacsParseError(TricolorError):
    """Malformed DIMACS `.col` input."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class GenerationError(TricolorError):
    """A graph could not be generated as requested."""


class PlanError(TricolorError):
    """Invalid experiment plan entry or unknown algorithm id."""


class UnsupportedTableEntry(TricolorError):
    """A lookup in a static critical-value table has no entry."""

    def __init__(self, what: str, supported: Iterable):
        self.supported = sorted(supported)
        super().__init__(f"{what} not tabulated; supported values: {self.supported}")
