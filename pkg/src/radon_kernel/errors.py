"""Exception types raised by the construction and certification code."""


class RadonKernelError(Exception):
    """Base class for all package errors."""


class DomainError(RadonKernelError, ValueError):
    """A weight or profile was queried outside its domain of definition."""


class BudgetExceeded(RadonKernelError):
    """Quadrature could not reach the requested tolerance within ``max_evals``.

    The best available estimate is attached so callers can still report it.
    """

    def __init__(self, message, value=float("nan"), error=float("inf"), n_evals=0):
        super().__init__(message)
        self.value = value
        self.error = error
        self.n_evals = n_evals


class NotFound(RadonKernelError):
    """No admissible threshold could be certified."""


class ConstructionFailed(RadonKernelError):
    """A local weight window collapsed below the minimum admissible width."""


class SignSearchFailed(RadonKernelError):
    """No plateau point with the required sign exists above the plane."""


class CoverTooLarge(RadonKernelError):
    """The greedy cover needed more local weights than allowed."""


class NoIntersection(RadonKernelError):
    """The requested line does not cross the shell it was asked about."""


class FrameError(RadonKernelError, ValueError):
    """A plane frame is not orthonormal to the required precision."""
