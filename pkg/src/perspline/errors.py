"""Exception types raised by perspline."""


class SplineError(ValueError):
    """Base class for invalid inputs to spline operations."""


class InvalidOrderError(SplineError):
    pass


class DifferentiationError(SplineError):
    """Raised when differentiating below order 1 (piecewise constants)."""


class StencilOverlapError(SplineError):
    """Stencil lags would alias on a cycle of the given length."""


class NotSymmetricError(SplineError):
    pass


class SingularMatrixError(ArithmeticError):
    def __init__(self, message: str, min_abs_eigenvalue: float):
        super().__init__(message)
        self.min_abs_eigenvalue = min_abs_eigenvalue


class SpectrumError(SplineError):
    """Degenerate or non-positive spectral interval."""


class SizeLimitError(SplineError):
    pass


class NonPeriodicError(SplineError):
    pass
