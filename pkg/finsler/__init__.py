"""
finsler-verify: numerical verification of anisotropic p-Laplacian identities.

The package exposes the norm families, scalar fields, the anisotropic
operator, Kelvin transforms, Wulff-ball averages and the checkers that turn
them into verification reports.
"""

from .errors import FinslerError, SpecParseError
from .norms import QNorm, QuadraticNorm, euclidean, quadratic
from .operators import OperatorConfig, finsler_p_laplacian, p_laplacian
from .reports import VerificationReport
from .sampling import SampleSpec

__version__ = "0.1.0"

__all__ = [
    "FinslerError",
    "SpecParseError",
    "QNorm",
    "QuadraticNorm",
    "euclidean",
    "quadratic",
    "OperatorConfig",
    "finsler_p_laplacian",
    "p_laplacian",
    "VerificationReport",
    "SampleSpec",
]
