"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TPMSError(Exception):
    """Base class for every error raised by the package."""


class ParameterDomainError(TPMSError, ValueError):
    """A parameter triple violates 0 < a < b < 1, 0 < x < 1."""


class ContinuationError(TPMSError):
    """A continuation step was too large; the caller must subdivide."""


class SingularPointError(TPMSError):
    """Evaluation requested on (or within the exclusion radius of) the branch locus."""


class QuadratureError(TPMSError):
    """Base class for quadrature failures."""


class AccuracyError(QuadratureError):
    """Adaptive refinement hit its limits before reaching the tolerance."""

    def __init__(self, message: str, best_estimate: complex, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class EvaluationError(QuadratureError):
    """The integrand returned a non-finite value."""

    def __init__(self, message: str, location: float):
        super().__init__(message)
        self.location = location


class NoRootError(TPMSError):
    """No sign change inside the bracket."""

    def __init__(self, message: str, lower_sign: float, upper_sign: float):
        super().__init__(message)
        self.lower_sign = lower_sign
        self.upper_sign = upper_sign


class DomainError(TPMSError, ValueError):
    """Argument outside the domain of a special function (e.g. x_a for a >= alpha)."""


class TraceError(TPMSError):
    """Curve continuation lost its bracket."""

    def __init__(self, message: str, last_good=None, points=None):
        super().__init__(message)
        self.last_good = last_good
        self.points = points or []


class ClosureError(TPMSError):
    """Period closure failed: seams or loop periods do not match."""


class DependencyError(TPMSError):
    """A required upstream result is unavailable."""


class MeshIOError(TPMSError, OSError):
    """Reading or writing a mesh file failed."""

    def __init__(self, message: str, path):
        super().__init__(f"{message}: {path}")
        self.path = path
