"""Exception types raised by nhrecur."""


class NotHermitianError(ValueError):
    """Raised when an operator that must be Hermitian is not."""


class NotPositiveError(ValueError):
    """Raised when an operator that must be positive (semi)definite is not."""


class DefectiveMatrixError(ValueError):
    """Raised when a biorthogonal expansion is requested at an exceptional point."""


class NumericalRangeError(ArithmeticError):
    """Raised when a computation leaves the representable floating point range."""
