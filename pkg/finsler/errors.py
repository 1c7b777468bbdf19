"""Exception hierarchy for finsler-verify.

Every error raised by the library derives from :class:`FinslerError` so that
entry points can translate library failures into exit codes with a single
``except`` clause.
"""

from __future__ import annotations


class FinslerError(Exception):
    """Base class for all library errors."""


# -- matrices ---------------------------------------------------------------

class NotSquare(FinslerError):
    pass


class NonFinite(FinslerError):
    pass


class NotPositiveDefinite(FinslerError):
    def __init__(self, smallest_eigenvalue: float, largest_eigenvalue: float):
        self.smallest_eigenvalue = smallest_eigenvalue
        self.largest_eigenvalue = largest_eigenvalue
        super().__init__(
            f"matrix is not positive definite: smallest eigenvalue "
            f"{smallest_eigenvalue:.6g} (largest {largest_eigenvalue:.6g})"
        )


class SingularMatrix(FinslerError):
    pass


class DimensionMismatch(FinslerError):
    pass


# -- evaluation -------------------------------------------------------------

class OutOfDomain(FinslerError):
    """A field or map was evaluated outside the open set it is defined on."""


class ZeroVector(OutOfDomain):
    """An operation undefined at the origin received the zero vector."""


class SingularGradient(FinslerError):
    pass


class DegenerateGradient(FinslerError):
    pass


class TooFewSamples(FinslerError):
    pass


class ParallelSamples(TooFewSamples):
    """Two sample directions coincide up to sign."""


class NotHarmonic(FinslerError):
    pass


class UnsupportedNorm(FinslerError):
    pass


class UnsupportedConfiguration(FinslerError):
    pass


# -- textual specifications -------------------------------------------------

class SpecParseError(FinslerError):
    """A norm, matrix, field or point specification string is malformed.

    ``position`` is the 0-based character offset in ``text`` where parsing
    failed.
    """

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        self.reason = message
        super().__init__(f"{message} at position {position} in {text!r}")


__all__ = [
    "FinslerError",
    "NotSquare",
    "NonFinite",
    "NotPositiveDefinite",
    "SingularMatrix",
    "DimensionMismatch",
    "OutOfDomain",
    "ZeroVector",
    "SingularGradient",
    "DegenerateGradient",
    "TooFewSamples",
    "ParallelSamples",
    "NotHarmonic",
    "UnsupportedNorm",
    "UnsupportedConfiguration",
    "SpecParseError",
]
