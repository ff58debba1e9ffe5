"""Exception types shared across the package."""


class CVWitnessError(Exception):
    """Base class for all package errors."""


class DimensionError(CVWitnessError, ValueError):
    """Raised when matrix or vector sizes do not match the mode count."""


class DomainError(CVWitnessError, ValueError):
    """Raised when an input lies outside an operation's domain (e.g. a non-positive matrix)."""


class NumericError(CVWitnessError, ArithmeticError):
    """Raised when a numerical routine fails (non-convergence, failed Cholesky)."""
