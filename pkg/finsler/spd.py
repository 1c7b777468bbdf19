"""Symmetric positive definite matrices at small dimension.

An :class:`SpdMatrix` is validated once, symmetrized, and decomposed with the
symmetric eigensolver; its square root ``B`` (``B @ B == M``) and inverse are
computed from that single decomposition and cached on the instance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, NotPositiveDefinite, NotSquare

logger = logging.getLogger(__name__)

MIN_DIMENSION = 2
MAX_DIMENSION = 8
PD_CUTOFF = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _compose(vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    """V diag(values) Vᵀ, symmetrized."""
    out = (vectors * values) @ vectors.T
    return 0.5 * (out + out.T)


@dataclass(frozen=True, eq=False)
class SpdMatrix:
    """Immutable SPD matrix with its eigendecomposition, square root and inverse."""

    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sqrt: np.ndarray
    inverse: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def inverse_sqrt(self) -> np.ndarray:
        return _compose(self.eigenvectors, 1.0 / np.sqrt(self.eigenvalues))

    @property
    def sqrt_det(self) -> float:
        """det(B) for B = sqrt(M)."""
        return float(np.prod(np.sqrt(self.eigenvalues)))

    @property
    def condition(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])

    @classmethod
    def from_eigh(cls, values: np.ndarray, vectors: np.ndarray) -> "SpdMatrix":
        values = np.asarray(values, dtype=float)
        vectors = np.asarray(vectors, dtype=float)
        return cls(
            entries=_frozen(_compose(vectors, values)),
            eigenvalues=_frozen(values),
            eigenvectors=_frozen(vectors),
            sqrt=_frozen(_compose(vectors, np.sqrt(values))),
            inverse=_frozen(_compose(vectors, 1.0 / values)),
        )

    def inverted(self) -> "SpdMatrix":
        """The SPD matrix M⁻¹, sharing this decomposition.

        ``m.inverted().inverted()`` reproduces ``m``'s stored arrays exactly.
        """
        order = np.argsort(1.0 / self.eigenvalues, kind="stable")
        return SpdMatrix(
            entries=self.inverse,
            eigenvalues=_frozen((1.0 / self.eigenvalues)[order]),
            eigenvectors=_frozen(self.eigenvectors[:, order]),
            sqrt=_frozen(self.inverse_sqrt),
            inverse=self.entries,
        )

    def same_as(self, other: "SpdMatrix", rtol: float = 0.0) -> bool:
        if self.n != other.n:
            return False
        scale = float(np.max(np.abs(self.entries)))
        return bool(np.max(np.abs(self.entries - other.entries)) <= rtol * scale)

    def tolist(self) -> list[list[float]]:
        return self.entries.tolist()

    def __repr__(self) -> str:
        return f"SpdMatrix({self.entries.tolist()!r})"


def validate_spd(raw) -> SpdMatrix:
    """Validate ``raw`` as a symmetric positive definite matrix.

    The input is symmetrized (m_ij ← (raw_ij + raw_ji)/2) before the
    eigendecomposition; matrices whose smallest eigenvalue does not exceed
    ``PD_CUTOFF`` times the largest are rejected rather than regularized.

    Raises
    ------
    NotSquare, NonFinite, DimensionMismatch, NotPositiveDefinite
    """
    try:
        a = np.array(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise NotSquare(f"matrix entries are not numeric: {e}") from e
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has non-finite entries")
    n = a.shape[0]
    if not MIN_DIMENSION <= n <= MAX_DIMENSION:
        raise DimensionMismatch(
            f"dimension {n} outside supported range [{MIN_DIMENSION}, {MAX_DIMENSION}]"
        )

    sym = 0.5 * (a + a.T)
    values, vectors = np.linalg.eigh(sym)
    lo, hi = float(values[0]), float(values[-1])
    if hi <= 0.0 or lo <= PD_CUTOFF * hi:
        raise NotPositiveDefinite(lo, hi)

    m = SpdMatrix.from_eigh(values, vectors)
    # keep the symmetrized input itself, not its reconstruction
    object.__setattr__(m, "entries", _frozen(sym))
    logger.debug("validated SPD matrix n=%d cond=%.3g", n, hi / lo)
    return m


def identity(n: int) -> SpdMatrix:
    return validate_spd(np.eye(n))


def sqrt_spd(m: SpdMatrix) -> SpdMatrix:
    """The unique SPD square root B of M, itself as an :class:`SpdMatrix`."""
    b = SpdMatrix.from_eigh(np.sqrt(m.eigenvalues), m.eigenvectors)
    object.__setattr__(b, "entries", m.sqrt)
    return b


def inverse_spd(m: SpdMatrix) -> np.ndarray:
    """M⁻¹ from the cached eigendecomposition."""
    return m.inverse


__all__ = [
    "SpdMatrix",
    "validate_spd",
    "identity",
    "sqrt_spd",
    "inverse_spd",
    "PD_CUTOFF",
]
