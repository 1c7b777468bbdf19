"""Pointwise anisotropic p-Laplacians and the weak-form residual.

Δ_p^H u = div(H^{p−1}(∇u) ∇H(∇u)) is always evaluated in divergence form:
central differences of the flux field y ↦ flux(∇u(y)), never a
second-difference stencil of u. With ``grad_mode="analytic"`` the inner
gradient is the field's closed-form gradient; otherwise it is itself a
central difference (the nested path, with the larger outer step).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import DegenerateGradient, DimensionMismatch
from .fields import (
    BumpFunction,
    Divergence,
    FIRST_DERIVATIVE_STEP,
    NESTED_STEP,
    ScalarField,
    default_step,
    fd_divergence_terms,
    fd_gradient,
)
from .norms import Norm, euclidean

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10


class OperatorConfig(BaseModel):
    """Numerical settings for one operator evaluation."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(2.0, gt=1.0, description="Exponent of the p-Laplacian")
    h_flux: Optional[float] = Field(
        None, gt=0.0, description="Divergence step; None applies the step-size policy"
    )
    grad_mode: Literal["analytic", "finite-difference"] = Field(
        "analytic", description="How the inner gradient ∇u is obtained"
    )
    degenerate_tol: float = Field(DEGENERATE_TOL, ge=0.0, description="H(∇u) below this is degenerate")

    def with_p(self, p: float) -> "OperatorConfig":
        return self.model_copy(update={"p": float(p)})

    def with_step(self, h_flux: Optional[float]) -> "OperatorConfig":
        return self.model_copy(update={"h_flux": h_flux})

    def nested(self, u: ScalarField) -> bool:
        return self.grad_mode == "finite-difference" or not u.has_gradient

    def step(self, u: ScalarField, x: np.ndarray) -> float:
        if self.h_flux is not None:
            return self.h_flux
        return default_step(x, NESTED_STEP if self.nested(u) else FIRST_DERIVATIVE_STEP)


def flux(h: Norm, p: float, g, degenerate_tol: float = DEGENERATE_TOL) -> np.ndarray:
    """H(g)^{p−1} ∇H(g), extended by 0 at degenerate gradients when p ≥ 2."""
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise DegenerateGradient(f"non-finite gradient {g}")
    hv = h.value(g)
    if hv <= degenerate_tol:
        if p >= 2.0:
            return np.zeros_like(g)
        raise DegenerateGradient(
            f"H(∇u) = {hv:.3g} <= {degenerate_tol:.3g} with p = {p} < 2: flux is unbounded"
        )
    return hv ** (p - 1.0) * h.gradient(g)


def _gradient_evaluator(u: ScalarField, cfg: OperatorConfig, x: np.ndarray):
    if not cfg.nested(u):
        return u.gradient
    if cfg.grad_mode == "analytic":
        logger.debug("%s has no analytic gradient; using nested differences", u.label)
    inner = default_step(x, FIRST_DERIVATIVE_STEP)
    return lambda y: fd_gradient(u, y, inner)


def finsler_p_laplacian_terms(h: Norm, cfg: OperatorConfig, u: ScalarField, x) -> Divergence:
    """Δ_p^H u(x) together with its residual scale.

    The magnitude is the larger of Σ_i|∂_i F_i| and |F|/(1 + |x|).
    """
    if h.n != u.n:
        raise DimensionMismatch(f"norm in R^{h.n}, field in R^{u.n}")
    step = cfg.step(u, np.asarray(x, dtype=float))
    x = u.check_point(x, radius=step)
    grad = _gradient_evaluator(u, cfg, x)

    def flux_field(y: np.ndarray) -> np.ndarray:
        return flux(h, cfg.p, grad(y), cfg.degenerate_tol)

    terms = fd_divergence_terms(flux_field, x, step)
    length = 1.0 + float(np.linalg.norm(x))
    return Divergence(terms.value, max(terms.magnitude, terms.flux_size / length), terms.flux_size)


def finsler_p_laplacian(h: Norm, cfg: OperatorConfig, u: ScalarField, x) -> float:
    """Δ_p^H u(x) = Σ_i ∂_i (H^{p−1}(∇u) H_{ξ_i}(∇u))."""
    return finsler_p_laplacian_terms(h, cfg, u, x).value


def p_laplacian_terms(cfg: OperatorConfig, u: ScalarField, x) -> Divergence:
    return finsler_p_laplacian_terms(euclidean(u.n), cfg, u, x)


def p_laplacian(cfg: OperatorConfig, u: ScalarField, x) -> float:
    """Isotropic Δ_p: the Euclidean specialization, same code path."""
    return p_laplacian_terms(cfg, u, x).value


# -- weak form --------------------------------------------------------------

MIN_QUAD_DENSITY = 32


@dataclass(frozen=True)
class WeakFormTerms:
    """∫ flux·∇φ, ∫ fφ and the normalizations ∫ |f|φ, ∫ |flux·∇φ|."""

    flux_term: float
    source_term: float
    scale: float
    flux_scale: float = 0.0

    @property
    def residual(self) -> float:
        return self.flux_term - self.source_term


def midpoint_grid(lo: np.ndarray, hi: np.ndarray, density: int) -> tuple[np.ndarray, float]:
    """Cell midpoints of a tensor grid on [lo, hi] and the cell volume.

    Offsets are made exactly antisymmetric about the box center.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    unit = (np.arange(density) + 0.5) / density * 2.0 - 1.0
    unit = 0.5 * (unit - unit[::-1])
    axes = [center[i] + half[i] * unit for i in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([m.ravel() for m in mesh])
    return points, float(np.prod(2.0 * half / density))


def weak_form_integrals(
    h: Norm,
    p: float,
    u: ScalarField,
    f: Optional[ScalarField],
    test: ScalarField,
    lo,
    hi,
    quad_density: int,
    degenerate_tol: float = DEGENERATE_TOL,
) -> WeakFormTerms:
    """Midpoint quadrature of ∫ flux(∇u)·∇φ and ∫ fφ over the box [lo, hi].

    ``test`` must vanish with its gradient outside the box; nodes where the
    test function and its gradient vanish are skipped.
    """
    if quad_density < MIN_QUAD_DENSITY:
        raise ValueError(f"quad_density must be at least {MIN_QUAD_DENSITY}, got {quad_density}")
    points, cell = midpoint_grid(lo, hi, quad_density)
    phi = test.evaluate_many(points)
    active = np.nonzero(phi > 0.0)[0]

    flux_terms: list[float] = []
    source_terms: list[float] = []
    for k in active:
        x = points[k]
        g = u.grad(x)
        flux_terms.append(float(flux(h, p, g, degenerate_tol) @ test.grad(x)))
        if f is not None:
            source_terms.append(f(x) * phi[k])
    # exactly rounded sums: symmetric cancellations stay exact
    return WeakFormTerms(
        math.fsum(flux_terms) * cell,
        math.fsum(source_terms) * cell,
        math.fsum(abs(t) for t in source_terms) * cell,
        math.fsum(abs(t) for t in flux_terms) * cell,
    )


def weak_form_terms(
    h: Norm,
    p: float,
    u: ScalarField,
    f: Optional[ScalarField],
    phi: BumpFunction,
    quad_density: int = 64,
) -> WeakFormTerms:
    lo, hi = phi.bounding_box()
    return weak_form_integrals(h, p, u, f, phi.field, lo, hi, quad_density)


def weak_form_residual(
    h: Norm,
    p: float,
    u: ScalarField,
    f: Optional[ScalarField],
    phi: BumpFunction,
    quad_density: int = 64,
) -> float:
    """∫ H^{p−1}(∇u) H_ξ(∇u)·∇φ dx − ∫ fφ dx; ``f=None`` means f ≡ 0."""
    return weak_form_terms(h, p, u, f, phi, quad_density).residual


__all__ = [
    "OperatorConfig",
    "WeakFormTerms",
    "flux",
    "finsler_p_laplacian",
    "finsler_p_laplacian_terms",
    "p_laplacian",
    "p_laplacian_terms",
    "midpoint_grid",
    "weak_form_integrals",
    "weak_form_terms",
    "weak_form_residual",
    "DEGENERATE_TOL",
]
