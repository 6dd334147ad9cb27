"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``NumericalError`` subclasses signal a numerical failure (exit code 2).
"""


class SamrotError(Exception):
    """Base class for all package errors."""


class ValidationError(SamrotError, ValueError):
    pass


class NumericalError(SamrotError, ArithmeticError):
    pass


class InvalidOrdering(ValidationError):
    """Principal moments not ordered ``0 < A <= B <= C``."""


class DegenerateBody(ValidationError):
    """Spherical body, ``A == B == C``."""


class NotSAM(ValidationError):
    """``B == C``: the oscillator frequency is unbounded."""


class InvalidParams(ValidationError):
    pass


class InvalidMomentum(ValidationError):
    pass


class ChartMismatch(ValidationError):
    pass


class UnboundSymbol(ValidationError):
    pass


class DependsOnAngle(ValidationError):
    pass


class NotKernelForm(ValidationError):
    pass


class OrderUnavailable(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class InvalidInclination(ValidationError):
    pass


class InexactDivision(NumericalError):
    """Raised by exact polynomial division; ``remainder`` holds what is left."""

    def __init__(self, message, remainder=None, quotient=None):
        super().__init__(message)
        self.remainder = remainder
        self.quotient = quotient


class OrderTooLarge(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularDenominator(NumericalError):
    pass
