"""Exception hierarchy shared by every sgflow module."""


class SGFlowError(Exception):
    """Base class for all errors raised by sgflow."""


class DomainError(SGFlowError, ValueError):
    """Argument outside the domain of a special function or formula."""


class ValidationError(SGFlowError, ValueError):
    """Malformed input data (inconsistent length scales, bad grids, bad tensors)."""


class ConstraintViolation(SGFlowError, ValueError):
    """Material parameters violate a dissipativity inequality.

    The ``inequality`` attribute names the violated condition.
    """

    def __init__(self, message, inequality=None):
        super().__init__(message)
        self.inequality = inequality


class GridError(ValidationError):
    """Grid too coarse, non-uniform, or otherwise unusable for a stencil."""


class SolverError(SGFlowError, RuntimeError):
    """A numerical solve failed (singular system, non-convergence)."""


class QuadratureError(SolverError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SaturationError(SGFlowError, OverflowError):
    """A closed-form evaluation overflowed double precision."""
