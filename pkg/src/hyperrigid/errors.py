"""Exception hierarchy shared across the package."""


class HyperrigidError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianError(HyperrigidError):
    """Input matrix violates the Hermitian symmetry tolerance."""


class DomainError(HyperrigidError):
    """A function was evaluated outside its domain (sqrt/log of a negative,
    division by zero, pole, overflow), or produced a non-finite value."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class DimensionError(HyperrigidError):
    """Matrix or vector dimensions do not match the operation's contract."""


class ConvergenceError(HyperrigidError):
    """An iterative kernel failed to converge within its iteration cap."""


class ExprSyntaxError(HyperrigidError):
    """Malformed expression text; carries the byte offset and what was expected."""

    def __init__(self, message, offset, expected=None):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.expected = expected
