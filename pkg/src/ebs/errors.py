"""Exception types shared across the package.

Exit-code mapping in the CLI: SpecError, SeqFileError and PreconditionError
are usage errors (exit 1); BudgetExceeded is a resource error (exit 2).
"""

from __future__ import annotations


class SpecError(ValueError):
    """Malformed semigroup spec string or invalid (k, n) parameters."""


class SeqFileError(ValueError):
    """Malformed sequence file; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class PreconditionError(ValueError):
    """Input violates a documented precondition of a structure operation."""


class BudgetExceeded(RuntimeError):
    """A search exceeded its node, time or state budget.

    Carries the partial progress counters so callers can report how far the
    search got before giving up.
    """

    def __init__(self, message: str, nodes: int = 0, elapsed_ms: int = 0):
        super().__init__(message)
        self.nodes = nodes
        self.elapsed_ms = elapsed_ms
