"""Shared exception types.

Every operation that can refuse an input does so through one of these, so the
CLI can map failures onto a stable machine-readable error report.
"""

from __future__ import annotations


class MsoHierError(Exception):
    """Base class for all domain errors raised by this package."""

    kind = "error"


class BudgetError(MsoHierError):
    """An exhaustive search or evaluation would exceed the configured budget."""

    kind = "budget"


class MalformedError(MsoHierError):
    """An input value violates a structural precondition (bad arity, unknown
    element, non-partition, inconsistent code, ...)."""

    kind = "malformed"


class ScopeError(MsoHierError):
    """A formula uses a variable or relation symbol it must not."""

    kind = "scope"


class QuotientError(MsoHierError):
    """A level quotient is not tree shaped; carries the offending classes."""

    kind = "quotient"

    def __init__(self, message: str, classes: tuple = ()):  # noqa: ANN001
        super().__init__(message)
        self.classes = classes
