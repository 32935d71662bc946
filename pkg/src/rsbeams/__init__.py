"""Exact Riemann-Silberstein beams with orbital angular momentum.

Closed-form Bessel and Laguerre-Gauss solutions of the complex Maxwell
equations built from a single scalar potential, photon-wavefunction
operators in position and momentum space, and the frequency content of
the Laguerre-Gauss family.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    FDToleranceError,
    InsufficientResolutionError,
    NonNormalizableError,
    OnAxisBasisError,
    QuadratureError,
    SingularDirectionError,
)
from .fields import *  # noqa: F401,F403
from .beams import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
from .momentum import *  # noqa: F401,F403
from .spectrum import *  # noqa: F401,F403
from .estimators import *  # noqa: F401,F403
