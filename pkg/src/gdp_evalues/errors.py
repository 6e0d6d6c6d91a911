"""Exception hierarchy shared by every module."""


class GdpEvalueError(Exception):
    """Base class for all library errors."""


class DomainError(GdpEvalueError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class BudgetMismatchError(DomainError):
    """Objects carrying different privacy budgets or sensitivities were combined."""


class ProvenanceError(DomainError):
    """A private e-value was not produced by the mechanism an operation requires."""


class ParseError(DomainError):
    """Malformed input file. ``row`` is the 1-based line number (header is row 1)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
