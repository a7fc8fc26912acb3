"""Exception hierarchy shared by every module of the package."""


class LogiGrowthError(Exception):
    """Base class for all errors raised by logigrowth."""


class DomainError(LogiGrowthError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation hit a singular locus (zero denominator, blow-up).

    ``locus`` describes where, e.g. ``{"K": 1.0}`` or an array of offending
    points.
    """

    def __init__(self, message, locus=None):
        super().__init__(message)
        self.locus = locus


class PoleError(SingularityError):
    """A rational expression was evaluated at one of its poles."""


class UndefinedSteadyStateError(DomainError):
    pass


class DegenerateError(DomainError):
    """Parameters collapse the problem (a == b, MP_L == 0, zero variance...)."""


class PreconditionError(DomainError):
    pass


class UnsupportedFamilyError(LogiGrowthError, TypeError):
    pass


class ConvergenceError(LogiGrowthError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class FitError(ConvergenceError):
    pass


class DataError(LogiGrowthError, ValueError):
    """Malformed or invalid input data; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
