"""Exception hierarchy.

Every error raised by the package derives from :class:`DoiforgeError`, so a
trial runner can catch one type and record diagnostics.
"""


class DoiforgeError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(DoiforgeError, ValueError):
    pass


class ConvergenceFailure(DoiforgeError, ArithmeticError):
    pass


class DomainError(DoiforgeError, ValueError):
    """A scalar function is undefined at a requested point."""


class NonPositiveAlpha(DoiforgeError, ValueError):
    pass


class DimensionMismatch(DoiforgeError, ValueError):
    pass


class InvalidSpec(DoiforgeError, ValueError):
    pass


class NonPositiveFactor(DoiforgeError, ValueError):
    pass


class InvalidParameter(DoiforgeError, ValueError):
    pass


class TailMassTooLarge(DoiforgeError, ArithmeticError):
    """A truncated integration grid drops more mass than allowed."""


class SpectrumContainsZero(DoiforgeError, ValueError):
    pass


class PreconditionError(DoiforgeError, ValueError):
    pass


class StepUnderflow(DoiforgeError, ArithmeticError):
    """Finite-difference steps shrank below the floor before an order regime appeared."""


class ConfigError(DoiforgeError, ValueError):
    pass


class IoError(DoiforgeError, OSError):
    """Report files could not be written."""
