"""Exception hierarchy shared by every module of the package."""


class RelBrauerError(Exception):
    """Base class for all errors raised by relbrauer."""


class ParseError(RelBrauerError, ValueError):
    pass


class ValidationError(RelBrauerError, ValueError):
    pass


class OrderBoundExceeded(ValidationError):
    pass


class AmbientMismatch(RelBrauerError, ValueError):
    pass


class NotASubgroup(RelBrauerError, ValueError):
    pass


class NotAQuotient(RelBrauerError, ValueError):
    pass


class InvalidQuintuple(RelBrauerError, ValueError):
    pass


class UnsupportedTarget(RelBrauerError, ValueError):
    pass


class DimensionMismatch(RelBrauerError, ValueError):
    pass


class NotACharacter(RelBrauerError, ArithmeticError):
    pass


class WrongQuotientType(RelBrauerError, ValueError):
    pass


class NotARelation(RelBrauerError, ValueError):
    pass


class NoCertificate(RelBrauerError):
    """Raised when a relative relation cannot be written over indufted generators.

    For valid input this would contradict the generation theorem, so callers
    treat it as a falsification event rather than as bad input.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class VerificationFailure(RelBrauerError):
    def __init__(self, failed, report=None):
        super().__init__("verification failed: " + ", ".join(failed))
        self.failed = list(failed)
        self.report = report
