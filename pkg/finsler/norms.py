"""Norm families H on the gradient space.

Two closed families are supported:

- :class:`QuadraticNorm`: H(ξ) = √⟨Mξ, ξ⟩ for an SPD matrix M, dual
  H*(ξ) = √⟨M⁻¹ξ, ξ⟩;
- :class:`QNorm`: H(ξ) = (Σ|ξ_i|^q)^{1/q}, dual the conjugate exponent
  q' = q/(q−1).

Each family provides value, gradient, the Hessian of H² and the dual in
closed form. The module-level functions (``eval_norm``, ``grad_norm`` ...)
are the public operations; ``dual_eval_numeric`` computes H* from its
definition as a support function and serves as an independent oracle for the
closed-form duals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import norm as gaussian
from scipy.stats import qmc

from .errors import DimensionMismatch, ParallelSamples, SingularGradient, TooFewSamples, ZeroVector
from .errors import FinslerError
from .spd import SpdMatrix, identity, validate_spd

logger = logging.getLogger(__name__)

ASCENT_STEPS = 20
MAX_SPHERE_POINTS = 1 << 18
QUADRATIC_RTOL = 1e-8
PARALLEL_TOL = 1e-12


def _vector(xi, n: int) -> np.ndarray:
    v = np.asarray(xi, dtype=float)
    if v.shape != (n,):
        raise DimensionMismatch(f"expected a vector of length {n}, got shape {v.shape}")
    return v


class Norm:
    """Common interface of the two norm families."""

    n: int

    def value(self, xi: np.ndarray) -> float:
        raise NotImplementedError

    def values(self, points: np.ndarray) -> np.ndarray:
        """Row-wise H over an (m, n) array."""
        raise NotImplementedError

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian_sq(self, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dual(self) -> "Norm":
        raise NotImplementedError

    def bounds(self) -> tuple[float, float]:
        """Constants (a, b) with a|ξ| ≤ H(ξ) ≤ b|ξ|."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class QuadraticNorm(Norm):
    matrix: SpdMatrix

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def sqrt(self) -> np.ndarray:
        return self.matrix.sqrt

    def value(self, xi: np.ndarray) -> float:
        v = _vector(xi, self.n)
        return float(np.sqrt(max(float(v @ self.matrix.entries @ v), 0.0)))

    def values(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        q = np.einsum("ij,jk,ik->i", pts, self.matrix.entries, pts)
        return np.sqrt(np.maximum(q, 0.0))

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        v = _vector(xi, self.n)
        h = self.value(v)
        if h == 0.0:
            raise ZeroVector("gradient of a norm is undefined at 0")
        return self.matrix.entries @ v / h

    def hessian_sq(self, xi: np.ndarray) -> np.ndarray:
        v = _vector(xi, self.n)
        if not np.any(v):
            raise ZeroVector("Hessian of H² requested at 0")
        return 2.0 * np.array(self.matrix.entries)

    def dual(self) -> "QuadraticNorm":
        return QuadraticNorm(self.matrix.inverted())

    def bounds(self) -> tuple[float, float]:
        ev = self.matrix.eigenvalues
        return float(np.sqrt(ev[0])), float(np.sqrt(ev[-1]))

    @property
    def spec(self) -> str:
        return "quad:" + _format_matrix(self.matrix.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadraticNorm):
            return NotImplemented
        return self.n == other.n and bool(
            np.array_equal(self.matrix.entries, other.matrix.entries)
        )

    def __hash__(self) -> int:
        return hash(("quad", self.matrix.entries.tobytes()))

    def __repr__(self) -> str:
        return f"QuadraticNorm({self.matrix.entries.tolist()!r})"


@dataclass(frozen=True)
class QNorm(Norm):
    q: float
    n: int
    conjugate: float = field(default=0.0, compare=False, repr=False)

    def __post_init__(self):
        if not self.q > 1.0 or not np.isfinite(self.q):
            raise FinslerError(f"q-norm exponent must be a finite q > 1, got {self.q}")
        if self.n < 2:
            raise DimensionMismatch(f"dimension must be at least 2, got {self.n}")
        if not self.conjugate:
            object.__setattr__(self, "conjugate", self.q / (self.q - 1.0))

    def value(self, xi: np.ndarray) -> float:
        v = np.abs(_vector(xi, self.n))
        s = float(v.max())
        if s == 0.0:
            return 0.0
        return s * float(np.sum((v / s) ** self.q) ** (1.0 / self.q))

    def values(self, points: np.ndarray) -> np.ndarray:
        a = np.abs(np.asarray(points, dtype=float))
        s = a.max(axis=1)
        safe = np.where(s > 0.0, s, 1.0)
        return s * np.sum((a / safe[:, None]) ** self.q, axis=1) ** (1.0 / self.q)

    def _ratios(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        v = _vector(xi, self.n)
        h = self.value(v)
        if h == 0.0:
            raise ZeroVector("gradient of a norm is undefined at 0")
        return np.sign(v), np.abs(v) / h, h

    def gradient(self, xi: np.ndarray) -> np.ndarray:
        sign, t, _ = self._ratios(xi)
        return sign * t ** (self.q - 1.0)

    def hessian_sq(self, xi: np.ndarray) -> np.ndarray:
        sign, t, _ = self._ratios(xi)
        if self.q < 2.0 and np.any(t == 0.0):
            raise SingularGradient(
                f"second derivatives of the {self.q:g}-norm blow up on coordinate hyperplanes"
            )
        w = sign * t ** (self.q - 1.0)
        return 2.0 * (2.0 - self.q) * np.outer(w, w) + 2.0 * (self.q - 1.0) * np.diag(
            t ** (self.q - 2.0)
        )

    def dual(self) -> "QNorm":
        return QNorm(self.conjugate, self.n, conjugate=self.q)

    def bounds(self) -> tuple[float, float]:
        c = self.n ** (1.0 / self.q - 0.5)
        return min(1.0, c), max(1.0, c)

    @property
    def spec(self) -> str:
        return f"q:{self.q:.17g}"


def _format_matrix(a: np.ndarray) -> str:
    rows = ",".join("[" + ",".join(f"{x:.17g}" for x in row) + "]" for row in np.asarray(a))
    return f"[{rows}]"


def quadratic(raw) -> QuadraticNorm:
    return QuadraticNorm(validate_spd(raw))


@lru_cache(maxsize=None)
def euclidean(n: int) -> QuadraticNorm:
    return QuadraticNorm(identity(n))


# -- operations -------------------------------------------------------------

def eval_norm(h: Norm, xi) -> float:
    return h.value(xi)


def grad_norm(h: Norm, xi) -> np.ndarray:
    """∇H(ξ); satisfies Euler's identity ⟨∇H(ξ), ξ⟩ = H(ξ)."""
    return h.gradient(xi)


def hessian_normsq(h: Norm, xi) -> np.ndarray:
    """∇²(H²)(ξ) in closed form (2M for quadratic norms)."""
    return h.hessian_sq(xi)


def dual_norm(h: Norm) -> Norm:
    return h.dual()


@lru_cache(maxsize=16)
def _sphere_grid(n: int, density: int) -> np.ndarray:
    if n == 2:
        theta = 2.0 * np.pi * np.arange(density) / density
        grid = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        count = int(min(density ** (n - 1), MAX_SPHERE_POINTS))
        cube = qmc.Halton(d=n, scramble=True, seed=0).random(count)
        g = gaussian.ppf(np.clip(cube, 1e-12, 1.0 - 1e-12))
        grid = g / np.linalg.norm(g, axis=1, keepdims=True)
    grid.setflags(write=False)
    return grid


def dual_eval_numeric(h: Norm, x, grid_density: int = 256) -> float:
    """H*(x) = sup over unit directions ω of ⟨x, ω⟩ / H(ω).

    The supremum over K = {H < 1} equals this quotient maximized on the
    Euclidean sphere by homogeneity. The best grid direction is refined by
    projected ascent with an adaptive step.
    """
    if grid_density < 16:
        raise FinslerError(f"grid_density must be at least 16, got {grid_density}")
    x = _vector(x, h.n)
    if not np.any(x):
        return 0.0

    omegas = _sphere_grid(h.n, grid_density)
    quotients = (omegas @ x) / h.values(omegas)
    k = int(np.argmax(quotients))
    omega, best = omegas[k], float(quotients[k])

    step = 2.0 * np.pi / grid_density if h.n == 2 else len(omegas) ** (-1.0 / (h.n - 1))
    for _ in range(ASCENT_STEPS):
        hv = h.value(omega)
        g = x / hv - (x @ omega) * h.gradient(omega) / hv**2
        g -= (g @ omega) * omega
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            break
        trial = omega + step * g / gn
        trial /= np.linalg.norm(trial)
        value = float(trial @ x) / h.value(trial)
        if value > best:
            omega, best = trial, value
            step *= 1.25
        else:
            step *= 0.3
    return best


def check_fk_condition(h: Norm, x, y) -> float:
    """Residual ⟨H(x)∇H(x), H*(y)∇H*(y)⟩ − ⟨x, y⟩ of the pairing identity."""
    x = _vector(x, h.n)
    y = _vector(y, h.n)
    hs = h.dual()
    left = h.value(x) * h.gradient(x)
    right = hs.value(y) * hs.gradient(y)
    return float(left @ right - x @ y)


def recover_quadratic(h: Norm, sample_points: Sequence) -> SpdMatrix | None:
    """Return M when ∇²(H²) is constant (= 2M) on the samples, else None.

    Samples must be nonzero and pairwise non-parallel.
    """
    points = [np.asarray(p, dtype=float) for p in sample_points]
    if len(points) < 2:
        raise TooFewSamples(f"need at least 2 sample points, got {len(points)}")
    for p in points:
        if not np.any(p):
            raise ZeroVector("sample points must be nonzero")
    units = np.array([p / np.linalg.norm(p) for p in points])
    cosines = np.abs(units @ units.T)
    np.fill_diagonal(cosines, 0.0)
    i, j = np.unravel_index(np.argmax(cosines), cosines.shape)
    if cosines[i, j] >= 1.0 - PARALLEL_TOL:
        raise ParallelSamples(f"sample points {i} and {j} are parallel")

    hessians = [h.hessian_sq(p) for p in points]
    first = hessians[0]
    scale = float(np.max(np.abs(first)))
    spread = max(float(np.max(np.abs(c - first))) for c in hessians[1:])
    if scale == 0.0 or spread > QUADRATIC_RTOL * scale:
        logger.debug("Hessian of H² not constant: spread %.3g vs scale %.3g", spread, scale)
        return None
    try:
        return validate_spd(first / 2.0)
    except FinslerError as e:
        logger.debug("constant Hessian is not SPD: %s", e)
        return None


__all__ = [
    "Norm",
    "QuadraticNorm",
    "QNorm",
    "quadratic",
    "euclidean",
    "eval_norm",
    "grad_norm",
    "hessian_normsq",
    "dual_norm",
    "dual_eval_numeric",
    "check_fk_condition",
    "recover_quadratic",
]
