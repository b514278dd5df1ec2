"""Exception types shared across the package."""


class SeminormError(Exception):
    """Base class for all errors raised by seminormkit."""


class InvalidInput(SeminormError, ValueError):
    """Arguments violate a documented precondition (shape, sign, range)."""


class UnsupportedExpression(SeminormError):
    """The expression lies outside the fragment an operation can handle exactly."""


class ZeroSeminorm(SeminormError):
    """The functional vanishes identically."""


class ZeroOnBasis(SeminormError):
    """The functional vanishes on every basis vector but not everywhere.

    This cannot happen for a genuine seminorm, so it points at a broken
    expression or a badly configured tolerance.
    """
