"""Scalar fields u: ℝⁿ → ℝ and the finite-difference engine.

A :class:`ScalarField` bundles a value evaluator, an optional analytic
gradient, an optional batch evaluator and a domain descriptor. Fields defined
on ℝⁿ∖{0} refuse evaluation at (and finite-difference stencils reaching) the
origin instead of returning garbage.

Builtins: polynomials from a multi-index coefficient table, pullbacks of
harmonic polynomials through B⁻¹, the Liouville profiles, constants,
exponentials, log-norm and the standard smooth bump.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DimensionMismatch, NotHarmonic, OutOfDomain, UnsupportedConfiguration
from .norms import Norm
from .spd import SpdMatrix

logger = logging.getLogger(__name__)

Vector = np.ndarray
ValueFn = Callable[[Vector], float]
GradientFn = Callable[[Vector], Vector]
BatchFn = Callable[[np.ndarray], np.ndarray]
VectorField = Callable[[Vector], Vector]

FIRST_DERIVATIVE_STEP = 1e-5
NESTED_STEP = 1e-4
ORIGIN_TOL = 1e-300


class Domain(str, enum.Enum):
    WHOLE = "R^n"
    PUNCTURED = "R^n\\{0}"


def default_step(x: Vector, scale: float = FIRST_DERIVATIVE_STEP) -> float:
    """Step-size policy: ``scale * (1 + |x|)``."""
    return scale * (1.0 + float(np.linalg.norm(x)))


@dataclass(frozen=True)
class ScalarField:
    n: int
    value: ValueFn
    gradient: Optional[GradientFn] = None
    domain: Domain = Domain.WHOLE
    label: str = "field"
    batch: Optional[BatchFn] = field(default=None, repr=False)

    def check_point(self, x: Vector, radius: float = 0.0) -> Vector:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(
                f"{self.label}: expected a point in R^{self.n}, got shape {x.shape}"
            )
        if self.domain is Domain.PUNCTURED and float(np.linalg.norm(x)) <= max(
            2.0 * radius, ORIGIN_TOL
        ):
            raise OutOfDomain(f"{self.label} is defined on R^n\\{{0}}; cannot evaluate near {x}")
        return x

    def __call__(self, x) -> float:
        return float(self.value(self.check_point(x)))

    def grad(self, x, h: float | None = None) -> Vector:
        """Analytic gradient when available, central differences otherwise."""
        x = self.check_point(x)
        if self.gradient is not None:
            return np.asarray(self.gradient(x), dtype=float)
        return fd_gradient(self, x, h if h is not None else default_step(x))

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.batch is not None:
            if self.domain is Domain.PUNCTURED and np.any(
                np.linalg.norm(pts, axis=1) <= ORIGIN_TOL
            ):
                raise OutOfDomain(f"{self.label} is defined on R^n\\{{0}}")
            return np.asarray(self.batch(pts), dtype=float)
        return np.array([self(p) for p in pts])

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None


# -- finite differences -----------------------------------------------------

def fd_gradient(u: ScalarField, x, h: float) -> Vector:
    """Central differences (u(x+he_i) − u(x−he_i)) / 2h."""
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    x = u.check_point(x, radius=h)
    out = np.empty(u.n)
    for i in range(u.n):
        e = np.zeros(u.n)
        e[i] = h
        out[i] = (u.value(x + e) - u.value(x - e)) / (2.0 * h)
    return out


@dataclass(frozen=True)
class Divergence:
    """A divergence value with the magnitude Σ_i |∂_i F_i| of its terms.

    ``flux_size`` is the largest |F| seen on the stencil.
    """

    value: float
    magnitude: float
    flux_size: float = 0.0

    def scaled(self, factor: float) -> "Divergence":
        return Divergence(self.value * factor, self.magnitude * abs(factor), self.flux_size * abs(factor))


def fd_divergence_terms(F: VectorField, x, h: float) -> Divergence:
    if h <= 0.0:
        raise ValueError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    total = 0.0
    magnitude = 0.0
    flux_size = 0.0
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        forward, backward = F(x + e), F(x - e)
        term = (forward[i] - backward[i]) / (2.0 * h)
        total += term
        magnitude += abs(term)
        flux_size = max(flux_size, float(np.linalg.norm(forward)), float(np.linalg.norm(backward)))
    return Divergence(float(total), float(magnitude), flux_size)


def fd_divergence(F: VectorField, x, h: float) -> float:
    """Σ_i (F_i(x+he_i) − F_i(x−he_i)) / 2h."""
    return fd_divergence_terms(F, x, h).value


# -- polynomials ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Polynomial:
    """Σ_k c_k Π_i y_i^{a_ki} stored as an exponent table and coefficients."""

    n: int
    exponents: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_table(cls, coeffs: Mapping[tuple[int, ...], float], n: int) -> "Polynomial":
        merged: dict[tuple[int, ...], float] = {}
        for alpha, c in coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n:
                raise DimensionMismatch(f"multi-index {alpha} does not have length {n}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in multi-index {alpha}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient for {alpha}")
            merged[alpha] = merged.get(alpha, 0.0) + c
        terms = sorted((a, c) for a, c in merged.items() if c != 0.0)
        exps = np.array([a for a, _ in terms], dtype=int).reshape(-1, n)
        cs = np.array([c for _, c in terms], dtype=float)
        return cls(n, exps, cs)

    def table(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(a) for a in row): float(c) for row, c in zip(self.exponents, self.coefficients)}

    def __call__(self, y: Vector) -> float:
        if not len(self.coefficients):
            return 0.0
        return float(self.coefficients @ np.prod(y ** self.exponents, axis=1))

    def evaluate_many(self, ys: np.ndarray) -> np.ndarray:
        if not len(self.coefficients):
            return np.zeros(len(ys))
        monomials = np.prod(ys[:, None, :] ** self.exponents[None, :, :], axis=2)
        return monomials @ self.coefficients

    def gradient(self, y: Vector) -> Vector:
        out = np.zeros(self.n)
        for i in range(self.n):
            a = self.exponents[:, i]
            mask = a > 0
            if not np.any(mask):
                continue
            lowered = self.exponents[mask].copy()
            lowered[:, i] -= 1
            out[i] = float((self.coefficients[mask] * a[mask]) @ np.prod(y ** lowered, axis=1))
        return out

    def laplacian(self) -> "Polynomial":
        """Δ applied term-wise on the coefficient table."""
        table: dict[tuple[int, ...], float] = {}
        for row, c in zip(self.exponents, self.coefficients):
            for i in range(self.n):
                if row[i] >= 2:
                    lowered = list(row)
                    lowered[i] -= 2
                    key = tuple(lowered)
                    table[key] = table.get(key, 0.0) + c * row[i] * (row[i] - 1)
        return Polynomial.from_table(table, self.n)

    def is_harmonic(self) -> bool:
        return len(self.laplacian().coefficients) == 0

    @property
    def degree(self) -> int:
        return int(self.exponents.sum(axis=1).max()) if len(self.coefficients) else 0

    def __str__(self) -> str:
        if not len(self.coefficients):
            return "0"
        parts = []
        for row, c in zip(self.exponents, self.coefficients):
            factors = [f"{c:.17g}"] + [
                f"y{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(row) if a
            ]
            parts.append("*".join(factors))
        return "+".join(parts).replace("+-", "-")


def make_polynomial(coeffs: Mapping[tuple[int, ...], float] | Polynomial, n: int) -> ScalarField:
    poly = coeffs if isinstance(coeffs, Polynomial) else Polynomial.from_table(coeffs, n)
    return ScalarField(
        n=n,
        value=poly,
        gradient=poly.gradient,
        label=f"poly:{poly}",
        batch=poly.evaluate_many,
    )


def make_harmonic_pullback(h_poly: Polynomial, sqrt: SpdMatrix) -> ScalarField:
    """u(x) = h(B⁻¹x) for a harmonic polynomial h; Δ^H u = 0 for H = Quadratic(B²)."""
    if h_poly.n != sqrt.n:
        raise DimensionMismatch(f"polynomial in {h_poly.n} variables, matrix of size {sqrt.n}")
    if not h_poly.is_harmonic():
        raise NotHarmonic(f"Δ({h_poly}) = {h_poly.laplacian()} is not identically zero")
    b_inv = sqrt.inverse

    def value(x: Vector) -> float:
        return h_poly(b_inv @ x)

    def gradient(x: Vector) -> Vector:
        return b_inv @ h_poly.gradient(b_inv @ x)

    def batch(xs: np.ndarray) -> np.ndarray:
        return h_poly.evaluate_many(xs @ b_inv)

    return ScalarField(
        n=sqrt.n,
        value=value,
        gradient=gradient,
        label=f"harmonic-pullback:{h_poly}",
        batch=batch,
    )


def make_constant(c: float, n: int) -> ScalarField:
    c = float(c)
    return ScalarField(
        n=n,
        value=lambda x: c,
        gradient=lambda x: np.zeros(n),
        label=f"constant:{c:.17g}",
        batch=lambda xs: np.full(len(xs), c),
    )


def make_exponential(direction) -> ScalarField:
    """u(y) = exp(⟨c, y⟩); never has a critical point."""
    c = np.asarray(direction, dtype=float)
    n = c.shape[0]
    label = "exp:" + ",".join(f"{v:.17g}" for v in c)
    return ScalarField(
        n=n,
        value=lambda y: float(np.exp(c @ y)),
        gradient=lambda y: np.exp(c @ y) * c,
        label=label,
        batch=lambda ys: np.exp(ys @ c),
    )


def make_log_norm(n: int) -> ScalarField:
    """u(y) = ln|y| on ℝⁿ∖{0}; n-harmonic in ℝⁿ."""
    return ScalarField(
        n=n,
        value=lambda y: float(np.log(np.linalg.norm(y))),
        gradient=lambda y: y / float(y @ y),
        domain=Domain.PUNCTURED,
        label="log-norm",
        batch=lambda ys: np.log(np.linalg.norm(ys, axis=1)),
    )


# -- Liouville profiles -----------------------------------------------------

LIOUVILLE_MU = 1.0 / 8.0


def make_liouville_profile(
    hstar: Norm,
    alpha: float = 0.0,
    scale: float = 1.0,
    center=None,
) -> ScalarField:
    """Radial solution of −Δ^H u = H*(x)^α e^u in ℝ².

    u(x) = ln(2(α+2)²μ) − 2 ln(1 + μ H*(y)^{α+2}) + (α+2) ln λ with
    y = λ(x − a), μ = 1/8. At α = 0, λ = 1, a = 0 this is
    −2 ln(1 + H*(x)²/8).
    """
    if hstar.n != 2:
        raise DimensionMismatch(f"the Liouville profile lives in R^2, got n={hstar.n}")
    if not alpha > -2.0:
        raise UnsupportedConfiguration(f"weight exponent must satisfy alpha > -2, got {alpha}")
    if not scale > 0.0:
        raise UnsupportedConfiguration(f"scale must be positive, got {scale}")
    a = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    if alpha != 0.0 and np.any(a):
        raise UnsupportedConfiguration("translated profiles only solve the unweighted equation")

    s = alpha + 2.0
    mu = LIOUVILLE_MU
    offset = float(np.log(2.0 * s * s * mu) + s * np.log(scale))

    def value(x: Vector) -> float:
        r = hstar.value(scale * (x - a))
        return offset - 2.0 * float(np.log1p(mu * r**s))

    def gradient(x: Vector) -> Vector:
        y = scale * (x - a)
        r = hstar.value(y)
        if r == 0.0:
            if s - 1.0 <= 0.0:
                raise OutOfDomain(f"profile gradient is singular at the center for alpha={alpha}")
            return np.zeros(2)
        return -2.0 * mu * s * r ** (s - 1.0) * hstar.gradient(y) * scale / (1.0 + mu * r**s)

    def batch(xs: np.ndarray) -> np.ndarray:
        r = hstar.values(scale * (xs - a))
        return offset - 2.0 * np.log1p(mu * r**s)

    label = "liouville" if alpha == 0.0 else f"liouville[alpha={alpha:g}]"
    return ScalarField(
        n=2,
        value=value,
        gradient=gradient,
        domain=Domain.WHOLE if alpha == 0.0 else Domain.PUNCTURED,
        label=label,
        batch=batch,
    )


def liouville_mass(alpha: float = 0.0) -> float:
    """∫_{ℝ²} |z|^α e^u dz for the isotropic profile: 4π(α+2)."""
    return 4.0 * np.pi * (alpha + 2.0)


def liouville_tail(radius: float, alpha: float = 0.0) -> float:
    """Isotropic mass outside the Euclidean ball of the given radius."""
    s = alpha + 2.0
    return liouville_mass(alpha) / (1.0 + LIOUVILLE_MU * radius**s)


# -- bump functions ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BumpFunction:
    """φ(x) = exp(−1/(1 − |x−c|²/ρ²)) inside the ball, 0 outside."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0.0:
            raise ValueError(f"bump radius must be positive, got {self.radius}")

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def __call__(self, x) -> float:
        d = np.asarray(x, dtype=float) - self.center
        s = float(d @ d) / self.radius**2
        if s >= 1.0:
            return 0.0
        return float(np.exp(-1.0 / (1.0 - s)))

    def gradient(self, x) -> Vector:
        d = np.asarray(x, dtype=float) - self.center
        s = float(d @ d) / self.radius**2
        if s >= 1.0:
            return np.zeros_like(d)
        t = 1.0 - s
        return -np.exp(-1.0 / t) * 2.0 * d / (self.radius**2 * t * t)

    def batch(self, xs: np.ndarray) -> np.ndarray:
        d = xs - self.center
        s = np.einsum("ij,ij->i", d, d) / self.radius**2
        inside = s < 1.0
        out = np.zeros(len(xs))
        out[inside] = np.exp(-1.0 / (1.0 - s[inside]))
        return out

    def bounding_box(self) -> tuple[Vector, Vector]:
        return self.center - self.radius, self.center + self.radius

    @property
    def field(self) -> ScalarField:
        return ScalarField(
            n=self.n,
            value=self.__call__,
            gradient=self.gradient,
            label=f"bump[{self.center.tolist()},{self.radius:g}]",
            batch=self.batch,
        )


__all__ = [
    "Domain",
    "ScalarField",
    "Divergence",
    "Polynomial",
    "BumpFunction",
    "default_step",
    "fd_gradient",
    "fd_divergence",
    "fd_divergence_terms",
    "make_polynomial",
    "make_harmonic_pullback",
    "make_constant",
    "make_exponential",
    "make_log_norm",
    "make_liouville_profile",
    "liouville_mass",
    "liouville_tail",
    "FIRST_DERIVATIVE_STEP",
    "NESTED_STEP",
]
