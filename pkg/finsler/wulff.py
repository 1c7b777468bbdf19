"""Wulff balls B_r(a) = {H*(ξ − a) < r} and their averages.

For a quadratic dual norm H*(y) = |B⁻¹y| the ball is the ellipsoid
a + rB·{|ω| ≤ 1}. Volume integrals are pulled back through x = a + Bz
(Jacobian det B) and computed with a polar rule (radial Gauss–Legendre ×
sphere rule); the sphere rule is the composite trapezoid on the angle for
n = 2 and Gauss–Legendre in cos θ × trapezoid in azimuth for n = 3.

The anisotropic surface measure is dℋ^{n−1}/|∇H*(x − a)|, which pulls back
to det(B)·r^{n−1} times the uniform sphere measure; the Euclidean variant
weights by the ellipsoid's own surface element det(B)|B⁻¹ω|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from .errors import DimensionMismatch, UnsupportedNorm
from .fields import ScalarField
from .norms import Norm, QuadraticNorm

logger = logging.getLogger(__name__)

MIN_VOLUME_DENSITY = 32
MIN_SURFACE_DENSITY = 64

Measure = Literal["anisotropic", "euclidean"]


def unit_ball_volume(n: int) -> float:
    """ω_n = π^{n/2} / Γ(n/2 + 1)."""
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def _require_quadratic(hstar: Norm) -> QuadraticNorm:
    if not isinstance(hstar, QuadraticNorm):
        raise UnsupportedNorm(
            f"Wulff-ball quadrature needs a quadratic dual norm, got {type(hstar).__name__}"
        )
    return hstar


def wulff_kappa(hstar: Norm, n: int) -> float:
    """κ = |B_1(0)| = det(B)·ω_n, B the square root of the primal matrix."""
    hq = _require_quadratic(hstar)
    if hq.n != n:
        raise DimensionMismatch(f"dual norm on R^{hq.n}, requested n={n}")
    return unit_ball_volume(n) / hq.matrix.sqrt_det


def sphere_rule(n: int, density: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on S^{n−1} and weights summing to |S^{n−1}|."""
    if n == 2:
        theta = 2.0 * np.pi * np.arange(density) / density
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        return nodes, np.full(density, 2.0 * np.pi / density)
    if n == 3:
        t, wt = leggauss(max(density // 2, 2))
        phi = 2.0 * np.pi * np.arange(density) / density
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        st = np.sqrt(1.0 - tt**2)
        nodes = np.column_stack([(st * np.cos(pp)).ravel(), (st * np.sin(pp)).ravel(), tt.ravel()])
        weights = np.repeat(wt, density) * (2.0 * np.pi / density)
        return nodes, weights
    raise DimensionMismatch(f"sphere quadrature is implemented for n in {{2, 3}}, got n={n}")


def ball_rule(n: int, radius: float, density: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in the Euclidean ball |z| < radius and weights summing to ω_n rⁿ."""
    x, w = leggauss(max(density // 2, 2))
    rho = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * rho ** (n - 1)
    omega, ws = sphere_rule(n, density)
    nodes = (rho[:, None, None] * omega[None, :, :]).reshape(-1, n)
    weights = (wr[:, None] * ws[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class Average:
    """An average of u and the average of |u| over the same nodes."""

    value: float
    magnitude: float


@dataclass(frozen=True, eq=False)
class WulffBall:
    center: np.ndarray
    radius: float
    dual_norm: QuadraticNorm

    def __post_init__(self):
        _require_quadratic(self.dual_norm)
        c = np.asarray(self.center, dtype=float)
        if c.shape != (self.dual_norm.n,):
            raise DimensionMismatch(f"center {c.tolist()} does not live in R^{self.dual_norm.n}")
        if not self.radius > 0.0:
            raise ValueError(f"Wulff ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", c)

    @property
    def n(self) -> int:
        return self.dual_norm.n

    @property
    def sqrt(self) -> np.ndarray:
        """B = √M of the primal norm, parametrizing the ball as a + rBω."""
        return self.dual_norm.matrix.inverse_sqrt

    @property
    def sqrt_det(self) -> float:
        return 1.0 / self.dual_norm.matrix.sqrt_det

    @property
    def kappa(self) -> float:
        return wulff_kappa(self.dual_norm, self.n)

    @property
    def volume(self) -> float:
        return self.kappa * self.radius**self.n

    def contains(self, x) -> bool:
        return self.dual_norm.value(np.asarray(x, dtype=float) - self.center) < self.radius

    def shifted(self, v) -> "WulffBall":
        return WulffBall(self.center + np.asarray(v, dtype=float), self.radius, self.dual_norm)

    def with_radius(self, r: float) -> "WulffBall":
        return WulffBall(self.center, r, self.dual_norm)


def _evaluate(u: ScalarField, points: np.ndarray) -> np.ndarray:
    if u.n != points.shape[1]:
        raise DimensionMismatch(f"field on R^{u.n}, ball in R^{points.shape[1]}")
    return u.evaluate_many(points)


def volume_average(u: ScalarField, ball: WulffBall, quad_density: int = 64) -> Average:
    if quad_density < MIN_VOLUME_DENSITY:
        raise ValueError(f"quad_density must be at least {MIN_VOLUME_DENSITY}, got {quad_density}")
    z, w = ball_rule(ball.n, ball.radius, quad_density)
    vals = _evaluate(u, ball.center + z @ ball.sqrt.T)
    norm = ball.kappa * ball.radius**ball.n
    return Average(
        float(ball.sqrt_det * (w @ vals) / norm),
        float(ball.sqrt_det * (w @ np.abs(vals)) / norm),
    )


def surface_average(
    u: ScalarField,
    ball: WulffBall,
    quad_density: int = 128,
    measure: Measure = "anisotropic",
) -> Average:
    if quad_density < MIN_SURFACE_DENSITY:
        raise ValueError(f"quad_density must be at least {MIN_SURFACE_DENSITY}, got {quad_density}")
    omega, w = sphere_rule(ball.n, quad_density)
    vals = _evaluate(u, ball.center + ball.radius * omega @ ball.sqrt.T)
    if measure == "anisotropic":
        scale = ball.sqrt_det * ball.radius ** (ball.n - 1)
        norm = ball.n * ball.kappa * ball.radius ** (ball.n - 1)
        return Average(float(scale * (w @ vals) / norm), float(scale * (w @ np.abs(vals)) / norm))
    if measure == "euclidean":
        element = w * np.linalg.norm(omega @ ball.dual_norm.matrix.sqrt.T, axis=1)
        perimeter = float(np.sum(element))
        return Average(float(element @ vals / perimeter), float(element @ np.abs(vals) / perimeter))
    raise ValueError(f"unknown surface measure {measure!r}")


def wulff_volume_average(u: ScalarField, ball: WulffBall, quad_density: int = 64) -> float:
    """(1/κrⁿ) ∫_{B_r(a)} u dx."""
    return volume_average(u, ball, quad_density).value


def wulff_surface_average(
    u: ScalarField,
    ball: WulffBall,
    quad_density: int = 128,
    measure: Measure = "anisotropic",
) -> float:
    """(1/nκr^{n−1}) ∫_{∂B_r(a)} u dS (anisotropic), or the Euclidean-measure mean."""
    return surface_average(u, ball, quad_density, measure).value


__all__ = [
    "WulffBall",
    "Average",
    "unit_ball_volume",
    "wulff_kappa",
    "sphere_rule",
    "ball_rule",
    "volume_average",
    "surface_average",
    "wulff_volume_average",
    "wulff_surface_average",
]
