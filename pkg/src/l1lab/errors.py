"""Exception types shared across the package."""


class L1LabError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(L1LabError, ValueError):
    """A vector or matrix has the wrong shape for the requested operation."""


class PowerIterationError(L1LabError, RuntimeError):
    """Power iteration failed to converge within its iteration budget."""

    def __init__(self, message, best_estimate):
        super().__init__(message)
        self.best_estimate = best_estimate


class Assumption2Error(L1LabError, ValueError):
    """A coordinate restriction of the smooth part is not strictly convex."""


class PreconditionError(L1LabError, ValueError):
    """A documented precondition of an operation does not hold."""


class UnboundedBelowError(L1LabError, RuntimeError):
    """One-dimensional minimization could not bracket a minimizer."""


class ConvergenceError(L1LabError, RuntimeError):
    """An iterative routine exhausted its budget before reaching tolerance."""


class NonFiniteIterateError(L1LabError, RuntimeError):
    """A solver produced a NaN or Inf iterate."""

    def __init__(self, message, iteration):
        super().__init__(message)
        self.iteration = iteration


class ReferenceSolveError(L1LabError, RuntimeError):
    """The reference minimizer failed to reach the required residual."""


class StartSearchError(L1LabError, RuntimeError):
    """No supersolution or subsolution start could be found."""
