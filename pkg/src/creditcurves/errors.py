"""Exception types shared across the package."""


class CreditCurvesError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CreditCurvesError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ParameterDomainError(DomainError):
    """A growth-model parameter violates its admissible range."""


class InsufficientDataError(CreditCurvesError):
    """Too few usable observations for the requested operation."""


class DegenerateSeriesError(CreditCurvesError):
    """The series carries no usable signal (e.g. zero variance)."""


class EmptySelectionError(CreditCurvesError):
    """A filter (year, scope, positivity) matched no records."""


class NumericalFailureError(CreditCurvesError):
    """A numerical procedure failed beyond recovery (singular system)."""


class RowParseError(CreditCurvesError):
    """A CSV row could not be parsed.

    Carries the 1-based line number so callers can report file/line context.
    """

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
