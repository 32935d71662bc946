"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class SingularDirectionError(DomainError):
    """A wave vector lies on a direction where the construction is singular."""


class OnAxisBasisError(DomainError):
    """Cylindrical basis vectors were requested on the symmetry axis."""


class FDToleranceError(ValueError):
    """A finite-difference step is too small relative to the coordinates."""


class NonNormalizableError(ValueError):
    """The amplitude has no finite photon norm."""


class InsufficientResolutionError(ValueError):
    """A sampling window is too short to resolve the requested feature."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge.

    The best available estimate is kept on the exception so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
