"""Exception types shared across the package.

The CLI maps these onto exit codes: refusals (caps) exit 3, bound
violations exit 4, everything else that is a usage problem exits 2.
"""


class PathIntError(Exception):
    """Base class for library errors."""


class DomainError(PathIntError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapExceededError(PathIntError):
    """A configured enumeration or memory cap would be exceeded."""

    def __init__(self, message: str, size: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.size = size
        self.cap = cap


class BoundViolationError(PathIntError):
    """A summand or integrand value exceeded its declared bound."""

    def __init__(self, message: str, where=None, value: float | None = None):
        super().__init__(message)
        self.where = where
        self.value = value


class GridOverflowError(PathIntError, OverflowError):
    """The grid cardinality m**d is too large to hold even symbolically."""
