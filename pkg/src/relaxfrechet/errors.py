"""Exception types shared across the package.

The CLI maps each class to a distinct exit code.
"""


class InputError(ValueError):
    """Invalid user input: bad point ids, malformed files, failed metric checks."""


class ResourceCapError(RuntimeError):
    """A configured size cap would be exceeded."""


class NumericError(ArithmeticError):
    """A numerical precondition failed (e.g. a covariance that is not PSD)."""
