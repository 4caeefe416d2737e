"""Exception hierarchy shared by all ambit modules."""


class AmbitError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AmbitError):
    """Malformed support-set input (text or programmatic entries)."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        if source is not None and line is not None:
            message = f"{source}:{line}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateSupportError(AmbitError):
    """The support set is empty (a distribution with no positive cells)."""


class MembershipError(AmbitError):
    """A value, vector, or codeword is not in the relevant support."""


class CapExceededError(AmbitError):
    """An instance is larger than a solver or oracle is willing to handle."""


class InvariantViolationError(AmbitError):
    """A cross-checked internal invariant failed; indicates a bug or a
    genuine defect in the underlying model.  Mapped to exit code 4 by the
    command line interface."""


class UsageError(AmbitError):
    """Incompatible or missing command line options."""
