"""Linear pullbacks, spherical inversion and anisotropic Kelvin transforms.

For a quadratic norm H(ξ) = √⟨Mξ, ξ⟩ with B = √M the Kelvin map
T_H(ξ) = ∇H(ξ)/H(ξ) = Mξ/H(ξ)² factors as L_B ∘ 𝓘 ∘ L_B, where
𝓘(x) = x/|x|² and L_B(x) = Bx. Transformed fields carry closed-form
gradients (chain rule) whenever the input field has one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularMatrix, UnsupportedNorm, ZeroVector
from .fields import Domain, ScalarField
from .norms import Norm, QuadraticNorm, euclidean
from .spd import SpdMatrix

logger = logging.getLogger(__name__)


def _matrix(b) -> np.ndarray:
    if isinstance(b, SpdMatrix):
        return np.asarray(b.entries)
    return np.asarray(b, dtype=float)


def pullback_linear(u: ScalarField, B) -> ScalarField:
    """ũ(x) = u(Bx), with gradient Bᵀ∇u(Bx)."""
    b = _matrix(B)
    if b.shape != (u.n, u.n):
        raise DimensionMismatch(f"matrix of shape {b.shape} for a field on R^{u.n}")
    if np.linalg.matrix_rank(b) < u.n:
        raise SingularMatrix(f"pullback matrix is singular: {b.tolist()}")
    bt = b.T

    def value(x: np.ndarray) -> float:
        return u(b @ x)

    gradient = None
    if u.gradient is not None:
        def gradient(x: np.ndarray) -> np.ndarray:
            return bt @ u.grad(b @ x)

    batch = None
    if u.batch is not None:
        def batch(xs: np.ndarray) -> np.ndarray:
            return u.evaluate_many(xs @ bt)

    return ScalarField(
        n=u.n,
        value=value,
        gradient=gradient,
        domain=u.domain,
        label=f"{u.label}∘L",
        batch=batch,
    )


def spherical_inversion(x) -> np.ndarray:
    """𝓘(x) = x/|x|²; an involution of ℝⁿ∖{0}."""
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    if r2 == 0.0:
        raise ZeroVector("spherical inversion is undefined at 0")
    return x / r2


@dataclass(frozen=True, eq=False)
class KelvinMap:
    """T_H for a quadratic norm H; refuses non-quadratic norms."""

    norm: QuadraticNorm

    def __post_init__(self):
        if not isinstance(self.norm, QuadraticNorm):
            raise UnsupportedNorm(
                f"Kelvin transforms need a quadratic norm, got {type(self.norm).__name__}"
            )

    @classmethod
    def for_norm(cls, h: Norm) -> "KelvinMap":
        return cls(h)

    @property
    def n(self) -> int:
        return self.norm.n

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.norm.matrix.entries)

    @property
    def sqrt(self) -> np.ndarray:
        return np.asarray(self.norm.matrix.sqrt)

    def dual(self) -> "KelvinMap":
        return KelvinMap(self.norm.dual())

    def __call__(self, xi) -> np.ndarray:
        return kelvin_point(self, xi)

    def jacobian(self, xi) -> np.ndarray:
        """DT_H(ξ) = M/H² − 2 (Mξ)(Mξ)ᵀ/H⁴ (symmetric)."""
        xi = np.asarray(xi, dtype=float)
        m = self.matrix
        mx = m @ xi
        h2 = float(xi @ mx)
        if h2 == 0.0:
            raise ZeroVector("Kelvin map is undefined at 0")
        return m / h2 - 2.0 * np.outer(mx, mx) / h2**2


def kelvin_point(k: KelvinMap, xi) -> np.ndarray:
    """T_H(ξ) = Mξ / H(ξ)²."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (k.n,):
        raise DimensionMismatch(f"expected a vector of length {k.n}, got shape {xi.shape}")
    mx = k.matrix @ xi
    h2 = float(xi @ mx)
    if h2 == 0.0:
        raise ZeroVector("Kelvin map is undefined at 0")
    return mx / h2


def kelvin_factored(k: KelvinMap, xi) -> np.ndarray:
    """L_B ∘ 𝓘 ∘ L_B (ξ), the factored form of T_H."""
    b = k.sqrt
    return b @ spherical_inversion(b @ np.asarray(xi, dtype=float))


def _kelvin_compose(u: ScalarField, k: KelvinMap, weight_power: float, label: str) -> ScalarField:
    """x ↦ u(T(x)) / H(x)^w on ℝⁿ∖{0}."""
    if u.n != k.n:
        raise DimensionMismatch(f"field on R^{u.n}, Kelvin map on R^{k.n}")
    m = k.matrix

    def value(x: np.ndarray) -> float:
        h2 = float(x @ m @ x)
        if h2 == 0.0:
            raise ZeroVector(f"{label} is undefined at 0")
        return u(m @ x / h2) / h2 ** (0.5 * weight_power)

    gradient = None
    if u.gradient is not None:
        def gradient(x: np.ndarray) -> np.ndarray:
            mx = m @ x
            h2 = float(x @ mx)
            if h2 == 0.0:
                raise ZeroVector(f"{label} is undefined at 0")
            t = mx / h2
            inner = k.jacobian(x) @ u.grad(t)
            if weight_power == 0:
                return inner
            weight = h2 ** (-0.5 * weight_power)
            # ∇H^{-w} = −w H^{-w-2} Mx
            return weight * inner - weight_power * u(t) * weight * mx / h2

    batch = None
    if u.batch is not None:
        def batch(xs: np.ndarray) -> np.ndarray:
            mxs = xs @ m
            h2 = np.einsum("ij,ij->i", xs, mxs)
            if np.any(h2 == 0.0):
                raise ZeroVector(f"{label} is undefined at 0")
            return u.evaluate_many(mxs / h2[:, None]) / h2 ** (0.5 * weight_power)

    return ScalarField(
        n=u.n,
        value=value,
        gradient=gradient,
        domain=Domain.PUNCTURED,
        label=label,
        batch=batch,
    )


def hat_transform(u: ScalarField, k: KelvinMap) -> ScalarField:
    """û = (u∘T_H) / H^{n−2} on ℝⁿ∖{0}."""
    return _kelvin_compose(u, k, k.n - 2, f"hat({u.label})")


def star_transform(u: ScalarField, k: KelvinMap) -> ScalarField:
    """u* = u∘T_H on ℝⁿ∖{0}."""
    return _kelvin_compose(u, k, 0, f"star({u.label})")


def classical_kelvin(u: ScalarField, n: int) -> ScalarField:
    """w_𝒦(x) = u(x/|x|²) / |x|^{n−2}."""
    if u.n != n:
        raise DimensionMismatch(f"field on R^{u.n}, requested Kelvin transform in R^{n}")
    return _kelvin_compose(u, KelvinMap(euclidean(n)), n - 2, f"kelvin({u.label})")


__all__ = [
    "KelvinMap",
    "pullback_linear",
    "spherical_inversion",
    "kelvin_point",
    "kelvin_factored",
    "hat_transform",
    "star_transform",
    "classical_kelvin",
]
