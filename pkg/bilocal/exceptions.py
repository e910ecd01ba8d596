"""
Exception types raised by the bilocal package.
"""


class BilocalError(Exception):
    """Base class for all errors raised by this package."""
    pass


class MatrixError(BilocalError, ValueError):
    """Custom exception for malformed matrices (shape, Hermiticity, qubit index)."""
    pass


class StateValidationError(BilocalError, ValueError):
    """Custom exception for state parameters that violate a validity constraint."""
    pass


class DomainViolationError(BilocalError, ValueError):
    """Custom exception for arguments outside the domain of a criterion."""
    pass


class DegenerateBranchError(BilocalError, ArithmeticError):
    """Raised when a normalization factor (W or N1) vanishes."""
    pass


class ScanConfigError(BilocalError, ValueError):
    """Custom exception for invalid scan configurations."""
    pass


class EmitError(BilocalError, OSError):
    """Raised when scan records cannot be written to their destination."""
    pass
