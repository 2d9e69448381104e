"""
Errors and Exit Codes
=====================

Every failure the library raises derives from ProofError, so callers
(the CLI in particular) can catch one base class and map it to an
exit code. Checking a derivation never raises: it returns a report.
"""

from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    FAILURE = 1
    NON_SINGULAR = 2
    PARSE_ERROR = 3
    BUDGET_EXHAUSTED = 4


class ProofError(Exception):
    """Base class of every library error."""
    exit_code = ExitCode.FAILURE


class ParseError(ProofError):
    exit_code = ExitCode.PARSE_ERROR

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class CaptureError(ProofError):
    """A substituted variable would be bound at the replaced occurrence."""


class ArityError(ProofError):
    """Variable and term lists of a simultaneous substitution differ in length."""


class MissingOccurrence(ProofError):
    """Contraction asked for two copies that are not there."""


class ContractionBlocked(ProofError):
    """Both copies are principal atoms of the same geometric rule instance."""


class MalformedDerivation(ProofError):
    """A tree that does not have the shape of a rule application."""


class MalformedAxiom(ProofError):
    exit_code = ExitCode.PARSE_ERROR


class UnknownTheory(ProofError):
    pass


class IncompleteInstantiation(ProofError):
    pass


class NonSingularTheory(ProofError):
    exit_code = ExitCode.NON_SINGULAR


class MalformedPartition(ProofError):
    exit_code = ExitCode.PARSE_ERROR


class InvariantViolation(ProofError):
    """Raised when the interpolation engine breaks its own invariants."""


class NotFoundWithinBudget(ProofError):
    exit_code = ExitCode.BUDGET_EXHAUSTED


class ImpureSequent(ProofError):
    """Some variable occurs both bound and free."""
