"""Exception types shared across the package."""


class MulrkError(Exception):
    """Base class for all library errors."""


class DomainError(MulrkError):
    """A multiplicative quantity was needed where it does not exist.

    Raised for the value 0+0i (which has no logarithm), for non-finite
    values, and for right-hand sides that produce either.  ``x`` names the
    grid abscissa of the failure when known; solvers attach it so callers
    can tell where a run broke down.
    """

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class ShapeError(MulrkError):
    """A tableau or state has the wrong number of stages or components."""


class StepCountError(MulrkError):
    """(x_end - x0) is not a positive integer multiple of h."""


class UnrecoverableZero(MulrkError):
    """The solution landed exactly on 0+0i at a grid point."""


class DegenerateError(MulrkError):
    """Errors are at the rounding floor; a convergence order is undefined."""


class ExprError(MulrkError):
    """Base class for expression parsing/evaluation errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text.  ``offset`` is the byte position of the
    offending token, ``expected`` describes what would have been legal."""

    def __init__(self, message, offset, expected=None):
        super().__init__(message)
        self.offset = offset
        self.expected = expected


class UnknownIdentifier(ExprSyntaxError):
    """An identifier outside the variable/function vocabulary."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier '{name}' at offset {offset}", offset)
        self.name = name


class EvalError(ExprError):
    """Expression evaluation hit a division by zero or a non-finite value."""
