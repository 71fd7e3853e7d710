"""Exception types raised across the package."""


class SpecError(ValueError):
    """Invalid model description or mismatched operands.

    ``field`` names the offending parameter when there is one.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalInputError(ValueError):
    """Non-finite or malformed numerical input."""


class NumericalFailureError(ArithmeticError):
    """A computation produced non-finite values or failed to converge."""

    def __init__(self, message, operation=None, step=None):
        super().__init__(message)
        self.operation = operation
        self.step = step


class DecompositionError(NumericalFailureError):
    pass


class ExceptionalPointError(NumericalFailureError):
    """Raised when an eigenmode is (numerically) self-orthogonal."""
