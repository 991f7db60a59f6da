"""
hardedge - Error hierarchy

Precondition errors map to CLI exit code 2, convergence errors to exit code 3.
"""
from typing import Optional


class HardEdgeError(Exception):
    """Base class for all library errors"""


class PreconditionError(HardEdgeError, ValueError):
    """Inputs violate a documented precondition"""

    exit_code = 2


class PoleError(PreconditionError):
    """A Gamma or Pochhammer factor vanishes"""


class StripError(PreconditionError):
    """Mellin variable outside 1/2 < Re(s) < alpha + 1"""


class DivergenceError(PreconditionError):
    """Unit-argument series outside its convergence margin"""


class NonintegrableError(PreconditionError):
    """Mellin integrand is not integrable for the requested s"""


class ModeError(PreconditionError):
    """Exact-rational mode cannot honour the request"""


class DomainError(PreconditionError):
    """Argument outside the support of a density"""


class PartitionCapError(PreconditionError):
    """Partition order outside the enumerable range"""


class ConvergenceError(HardEdgeError, ArithmeticError):
    """A numerical procedure did not reach its target"""

    exit_code = 3


class NonconvergenceError(ConvergenceError):
    """Series stopping rule not met within the term cap"""


class ToleranceError(ConvergenceError):
    """Quadrature error estimate above the requested tolerance"""

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved


class EigensolverError(ConvergenceError):
    """Tridiagonal eigensolver failed or returned an unusable spectrum"""
