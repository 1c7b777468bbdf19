"""Checkers that evaluate both sides of each identity and report residuals.

Every checker samples points (or quadrature nodes), evaluates the two sides
independently, and reduces the residuals into a :class:`VerificationReport`.
Each accepts ``corrupt`` so the harness can be shown to fail:

- ``matrix``   B ↦ M in the linear change of variables, M ↦ M⁻¹ in Kelvin
  maps, H* ↦ H in the pairing identity and in the Wulff ball;
- ``exponent`` p ↦ p + 1 on one side, Kelvin weights off by one, the wrong
  dimension in κ, the Liouville weight α ↦ α + 1.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, UnsupportedConfiguration, UnsupportedNorm
from .fields import (
    FIRST_DERIVATIVE_STEP,
    NESTED_STEP,
    BumpFunction,
    Domain,
    Polynomial,
    ScalarField,
    liouville_mass,
    liouville_tail,
    make_constant,
    make_harmonic_pullback,
    make_liouville_profile,
)
from .norms import Norm, QuadraticNorm, check_fk_condition, dual_eval_numeric, euclidean, quadratic, recover_quadratic
from .operators import (
    OperatorConfig,
    finsler_p_laplacian,
    finsler_p_laplacian_terms,
    p_laplacian_terms,
    weak_form_integrals,
    weak_form_terms,
)
from .reports import ResidualTable, SubCheck, VerificationReport, relative_residual
from .sampling import SampleSpec, avoid_coordinate_planes
from .spd import sqrt_spd
from .transforms import (
    KelvinMap,
    classical_kelvin,
    hat_transform,
    kelvin_factored,
    kelvin_point,
    pullback_linear,
    star_transform,
)
from .wulff import WulffBall, surface_average, unit_ball_volume, volume_average, wulff_kappa

logger = logging.getLogger(__name__)

ANALYTIC_TOL = 1e-6
NESTED_TOL = 1e-3
KELVIN_TOL = 1e-5
ALGEBRA_TOL = 1e-12
IDENTITY_TOL = 1e-10
FK_TOL = 1e-10
DUAL_TOL = 1e-6
MASS_RTOL = 5e-3
NORMALIZATION_TOL = 1e-12

CRITICAL_GRADIENT = 1e-2
ORIGIN_EXCLUSION = 0.05
MAX_WORKERS = 8

DEFAULT_ANNULI: dict[str, tuple[float, float]] = {
    "theorem1": (0.0, 2.0),
    "op": (0.0, 2.0),
    "kelvin2": (0.3, 3.0),
    "kelvin-n": (0.3, 3.0),
    "kelvin-algebra": (0.3, 3.0),
    "liouville": (0.0, 5.0),
    "classify": (0.5, 2.0),
    "dual": (0.5, 2.0),
}

DEFAULT_MVP_CENTERS = ((1.0, 1.0), (-0.5, 0.3), (0.0, 2.0))
DEFAULT_MVP_RADII = (0.25, 0.5, 1.0)

FIELD_SUITE: dict[str, str] = {
    "quadratic": "poly:y1^2+y2^2",
    "saddle": "poly:y1^2-y2^2+y1",
    "cubic": "poly:y1^3+y1*y2+y2",
    "linear": "poly:y1+2*y2",
    "exponential": "exp:0.3,-0.2",
}


class Corruption(str, enum.Enum):
    NONE = "none"
    MATRIX = "matrix"
    EXPONENT = "exponent"


def builtin_field_suite(n: int = 2) -> dict[str, ScalarField]:
    from .specs import parse_field

    return {name: parse_field(spec, n) for name, spec in FIELD_SUITE.items()}


# -- helpers ----------------------------------------------------------------

def _quadratic(h: Norm, check: str) -> QuadraticNorm:
    if not isinstance(h, QuadraticNorm):
        raise UnsupportedNorm(f"{check} needs a quadratic norm, got {type(h).__name__}")
    return h


def _samples(s: Optional[SampleSpec], check: str) -> SampleSpec:
    if s is not None:
        return s
    r_min, r_max = DEFAULT_ANNULI[check]
    return SampleSpec(count=100, r_min=r_min, r_max=r_max)


def default_tolerance(cfg: OperatorConfig, u: ScalarField) -> float:
    return NESTED_TOL if cfg.nested(u) else ANALYTIC_TOL


def _nominal_step(cfg: OperatorConfig, u: ScalarField) -> float:
    if cfg.h_flux is not None:
        return cfg.h_flux
    return NESTED_STEP if cfg.nested(u) else FIRST_DERIVATIVE_STEP


def _map(fn: Callable, points: Sequence, parallel: bool) -> list:
    """Order-preserving map, optionally over a thread pool."""
    if not parallel or len(points) < 2:
        return [fn(x) for x in points]
    with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(points))) as pool:
        return list(pool.map(fn, points))


def _avoid_critical(u: ScalarField, transform: Callable[[np.ndarray], np.ndarray] | None = None):
    def exclude(x: np.ndarray) -> bool:
        y = x if transform is None else transform(x)
        return float(np.linalg.norm(u.grad(y))) < CRITICAL_GRADIENT

    return exclude


def _value_subcheck(name: str, xs, lhs: Sequence[float], rhs: Sequence[float], tol: float) -> SubCheck:
    """Pointwise value identity, scaled by the largest value on the sample set."""
    table = ResidualTable()
    scale = max([abs(v) for v in lhs] + [abs(v) for v in rhs] + [0.0])
    for x, a, b in zip(xs, lhs, rhs):
        table.add(x, a, b, scale=scale)
    return table.sub_check(name, tol)


def _finish(report: VerificationReport) -> VerificationReport:
    logger.info(
        "%s: %s, max rel residual %.3e (tolerance %.1e, %d samples)",
        report.check,
        "passed" if report.passed else "FAILED",
        report.max_rel_residual,
        report.tolerance,
        report.samples,
    )
    for pt in report.worst[:3]:
        logger.debug("  worst %s: lhs=%.12g rhs=%.12g rel=%.3e", pt.x, pt.lhs, pt.rhs, pt.rel_residual)
    for sub in report.sub_checks:
        if not sub.passed:
            logger.warning("%s: sub-check %s failed (%.3e > %.1e)", report.check, sub.name, sub.max_rel_residual, sub.tolerance)
    if not report.passed:
        logger.warning("%s failed on %s", report.check, report.norm)
    return report


# -- linear change of variables ----------------------------------------------

def check_theorem1(
    h: Norm,
    p: float,
    u: ScalarField,
    s: Optional[SampleSpec] = None,
    cfg: Optional[OperatorConfig] = None,
    *,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
    parallel: bool = False,
) -> VerificationReport:
    """Δ_p ũ(x) against (Δ_p^H u)(Bx) for ũ = u∘L_B, plus the pointwise identities
    |∇ũ|²(x) = H(∇u)²(Bx) and ∇ũ·∇φ̃(x) = ⟨M∇u, ∇φ⟩(Bx).
    """
    hq = _quadratic(h, "theorem1")
    corrupt = Corruption(corrupt)
    cfg = (cfg or OperatorConfig()).with_p(p)
    n = hq.n
    m = np.asarray(hq.matrix.entries)
    b = m if corrupt is Corruption.MATRIX else np.asarray(hq.matrix.sqrt)
    left_cfg = cfg.with_p(p + 1.0) if corrupt is Corruption.EXPONENT else cfg
    tol = tolerance if tolerance is not None else default_tolerance(cfg, u)
    s = _samples(s, "theorem1")
    if p != 2.0:
        s = s.excluding(_avoid_critical(u, lambda x: b @ x))

    logger.info("theorem1: %s, p=%g, field %s, %d samples", hq.spec, p, u.label, s.count)
    u_tilde = pullback_linear(u, b)
    points = s.points(n)

    def evaluate(x: np.ndarray):
        left = p_laplacian_terms(left_cfg, u_tilde, x)
        right = finsler_p_laplacian_terms(hq, cfg, u, b @ x)
        return left, right

    table = ResidualTable()
    for x, (left, right) in zip(points, _map(evaluate, points, parallel)):
        table.add(x, left.value, right.value, scale=max(left.magnitude, right.magnitude))

    reach = max(float(np.max(np.linalg.norm(points @ b.T, axis=1))), 1.0)
    phi = BumpFunction(np.zeros(n), 1.5 * reach)
    phi_tilde = pullback_linear(phi.field, b)
    grads, norms_sq, pairs_x, pairs_y = [], [], [], []
    for x in points:
        g_tilde = u_tilde.grad(x)
        g = u.grad(b @ x)
        grads.append(float(g_tilde @ g_tilde))
        norms_sq.append(hq.value(g) ** 2)
        pairs_x.append(float(g_tilde @ phi_tilde.grad(x)))
        pairs_y.append(float(m @ g @ phi.gradient(b @ x)))
    sub_tol = NESTED_TOL if cfg.nested(u) else IDENTITY_TOL
    subs = [
        _value_subcheck("gradient-norm identity", points, grads, norms_sq, sub_tol),
        _value_subcheck("bilinear-form identity", points, pairs_x, pairs_y, sub_tol),
    ]
    return _finish(
        table.report(
            check="theorem1",
            norm=hq.spec,
            n=n,
            p=p,
            tolerance=tol,
            seed=s.seed,
            fd_step=_nominal_step(cfg, u),
            corrupt=corrupt.value,
            sub_checks=subs,
            extras={"field": u.label, "bump_radius": phi.radius},
        )
    )


def check_theorem1_weak(
    h: Norm,
    u: ScalarField,
    phi: Optional[BumpFunction] = None,
    cfg: Optional[OperatorConfig] = None,
    quad_density: int = 64,
    *,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """∫|∇ũ|^{p−2}∇ũ·∇φ̃ dx against det(B)⁻¹ ∫ H^{p−1}(∇u)∇H(∇u)·∇φ dy.

    The two integrals use independent midpoint grids: one on the bounding box
    of supp φ, one on the bounding box of B⁻¹(supp φ).
    """
    hq = _quadratic(h, "theorem1-weak")
    corrupt = Corruption(corrupt)
    cfg = cfg or OperatorConfig()
    n = hq.n
    phi = phi or BumpFunction(np.zeros(n), 1.0)
    b = np.asarray(hq.matrix.entries if corrupt is Corruption.MATRIX else hq.matrix.sqrt)
    b_inv = np.linalg.inv(b)
    left_p = cfg.p + 1.0 if corrupt is Corruption.EXPONENT else cfg.p
    tol = tolerance if tolerance is not None else default_tolerance(cfg, u)

    logger.info("theorem1-weak: %s, p=%g, field %s, density %d", hq.spec, cfg.p, u.label, quad_density)
    u_tilde = pullback_linear(u, b)
    phi_tilde = pullback_linear(phi.field, b)
    center = b_inv @ phi.center
    half = phi.radius * np.sqrt(np.sum(b_inv**2, axis=1))

    left = weak_form_integrals(
        euclidean(n), left_p, u_tilde, None, phi_tilde, center - half, center + half,
        quad_density, cfg.degenerate_tol,
    )
    lo, hi = phi.bounding_box()
    right = weak_form_integrals(hq, cfg.p, u, None, phi.field, lo, hi, quad_density, cfg.degenerate_tol)
    det_b = hq.matrix.sqrt_det

    table = ResidualTable()
    table.add(
        phi.center,
        left.flux_term,
        right.flux_term / det_b,
        scale=max(left.flux_scale, right.flux_scale / det_b),
        label="weak",
    )
    return _finish(
        table.report(
            check="theorem1-weak",
            norm=hq.spec,
            n=n,
            p=cfg.p,
            tolerance=tol,
            corrupt=corrupt.value,
            extras={
                "field": u.label,
                "quad_density": quad_density,
                "det_B": det_b,
                "bump_center": phi.center.tolist(),
                "bump_radius": phi.radius,
            },
        )
    )


# -- Kelvin transforms ------------------------------------------------------

def _kelvin_setup(h: Norm, check: str, s: Optional[SampleSpec], corrupt: Corruption):
    hq = _quadratic(h, check)
    s = _samples(s, check)
    if s.r_min <= 0.0:
        raise UnsupportedConfiguration(f"{check} samples must avoid the origin (r_min > 0), got {s.r_min}")
    kmap = KelvinMap(hq.dual() if corrupt is Corruption.MATRIX else hq)
    return hq, s, kmap


def _kelvin_check(
    hq: QuadraticNorm,
    kmap: KelvinMap,
    transformed: ScalarField,
    u: ScalarField,
    weight: float,
    s: SampleSpec,
    cfg: OperatorConfig,
    parallel: bool,
) -> tuple[ResidualTable, np.ndarray]:
    hstar = hq.dual()
    points = s.points(hq.n)

    def evaluate(x: np.ndarray):
        left = finsler_p_laplacian_terms(hstar, cfg, transformed, x)
        right = finsler_p_laplacian_terms(hq, cfg, u, kelvin_point(kmap, x))
        return left, right.scaled(hq.value(x) ** -weight)

    table = ResidualTable()
    for x, (left, right) in zip(points, _map(evaluate, points, parallel)):
        table.add(x, left.value, right.value, scale=max(left.magnitude, right.magnitude))
    return table, points


def check_kelvin_p2(
    h: Norm,
    u: ScalarField,
    s: Optional[SampleSpec] = None,
    cfg: Optional[OperatorConfig] = None,
    *,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
    parallel: bool = False,
) -> VerificationReport:
    """Δ^{H*}û(x) against (Δ^H u)(T_H x)/H(x)^{n+2}, with û = (u∘T_H)/H^{n−2}.

    The sub-check confirms û(B⁻¹η) = (u∘L_B)_𝒦(η) at η = Bx.
    """
    corrupt = Corruption(corrupt)
    hq, s, kmap = _kelvin_setup(h, "kelvin2", s, corrupt)
    n = hq.n
    cfg = (cfg or OperatorConfig()).with_p(2.0)
    weight = n + 2 + (1 if corrupt is Corruption.EXPONENT else 0)
    tol = tolerance if tolerance is not None else (NESTED_TOL if cfg.nested(u) else KELVIN_TOL)

    logger.info("kelvin2: %s, field %s, %d samples", hq.spec, u.label, s.count)
    u_hat = hat_transform(u, kmap)
    table, points = _kelvin_check(hq, kmap, u_hat, u, weight, s, cfg, parallel)

    b = np.asarray(hq.matrix.sqrt)
    kelvin_of_pullback = classical_kelvin(pullback_linear(u, b), n)
    conjugation = _value_subcheck(
        "hat conjugation",
        points,
        [u_hat(x) for x in points],
        [kelvin_of_pullback(b @ x) for x in points],
        IDENTITY_TOL,
    )
    return _finish(
        table.report(
            check="kelvin2",
            norm=hq.spec,
            n=n,
            p=2.0,
            tolerance=tol,
            seed=s.seed,
            fd_step=_nominal_step(cfg, u),
            corrupt=corrupt.value,
            sub_checks=[conjugation],
            extras={"field": u.label, "weight": weight, "annulus": [s.r_min, s.r_max]},
        )
    )


def check_kelvin_pn(
    h: Norm,
    u: ScalarField,
    s: Optional[SampleSpec] = None,
    cfg: Optional[OperatorConfig] = None,
    *,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
    parallel: bool = False,
) -> VerificationReport:
    """Δ_n^{H*}u*(x) against (Δ_n^H u)(T_H x)/H(x)^{2n}, with u* = u∘T_H."""
    corrupt = Corruption(corrupt)
    hq, s, kmap = _kelvin_setup(h, "kelvin-n", s, corrupt)
    n = hq.n
    p = float(n)
    cfg = (cfg or OperatorConfig()).with_p(p)
    weight = 2 * n + (1 if corrupt is Corruption.EXPONENT else 0)
    tol = tolerance if tolerance is not None else (NESTED_TOL if cfg.nested(u) else KELVIN_TOL)
    if p != 2.0:
        s = s.excluding(_avoid_critical(u, lambda x: kelvin_point(kmap, x)))

    logger.info("kelvin-n: %s, p=%g, field %s, %d samples", hq.spec, p, u.label, s.count)
    table, _ = _kelvin_check(hq, kmap, star_transform(u, kmap), u, weight, s, cfg, parallel)
    return _finish(
        table.report(
            check="kelvin-n",
            norm=hq.spec,
            n=n,
            p=p,
            tolerance=tol,
            seed=s.seed,
            fd_step=_nominal_step(cfg, u),
            corrupt=corrupt.value,
            extras={"field": u.label, "weight": weight, "annulus": [s.r_min, s.r_max]},
        )
    )


def check_kelvin_algebra(
    h: Norm,
    s: Optional[SampleSpec] = None,
    *,
    tolerance: float = ALGEBRA_TOL,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """T_{H*}∘T_H = id; sub-checks H*(T_H x)·H(x) = 1, T_H = L_B∘𝓘∘L_B and
    T_H = ∇H/H.
    """
    corrupt = Corruption(corrupt)
    hq = _quadratic(h, "kelvin-algebra")
    s = _samples(s, "kelvin-algebra")
    n = hq.n
    hstar = hq.dual()
    k = KelvinMap(hq)
    k_back = k if corrupt is Corruption.MATRIX else KelvinMap(hstar)

    logger.info("kelvin-algebra: %s, %d samples", hq.spec, s.count)
    main, reciprocity, factored, gradient = ResidualTable(), ResidualTable(), ResidualTable(), ResidualTable()
    for x in s.points(n):
        t = kelvin_point(k, x)
        hx = hq.value(x)
        forward = t / hx if corrupt is Corruption.EXPONENT else t
        back = kelvin_point(k_back, forward)
        main.add(x, float(np.linalg.norm(back)), float(np.linalg.norm(x)),
                 abs_residual=float(np.linalg.norm(back - x)))
        reciprocity.add(x, hstar.value(t) * hx, 1.0)
        via_inversion = kelvin_factored(k, x)
        factored.add(x, float(np.linalg.norm(via_inversion)), float(np.linalg.norm(t)),
                     abs_residual=float(np.linalg.norm(via_inversion - t)))
        via_gradient = hq.gradient(x) / hx
        gradient.add(x, float(np.linalg.norm(via_gradient)), float(np.linalg.norm(t)),
                     abs_residual=float(np.linalg.norm(via_gradient - t)))
    subs = [
        reciprocity.sub_check("norm reciprocity", tolerance),
        factored.sub_check("inversion factorization", tolerance),
        gradient.sub_check("gradient form", tolerance),
    ]
    return _finish(
        main.report(
            check="kelvin-algebra",
            norm=hq.spec,
            n=n,
            tolerance=tolerance,
            seed=s.seed,
            corrupt=corrupt.value,
            sub_checks=subs,
            extras={"annulus": [s.r_min, s.r_max]},
        )
    )


def check_dual_weak(
    h: Norm,
    u: ScalarField,
    phi: Optional[BumpFunction] = None,
    cfg: Optional[OperatorConfig] = None,
    quad_density: int = 64,
    *,
    exponent: str = "2",
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """Weak form of the dual equations.

    With f = −Δ_p^H u, the transformed field v (û for ``exponent="2"``, u* for
    ``exponent="n"``) must satisfy ∫ H*^{p−1}(∇v)∇H*(∇v)·∇φ = ∫ f̂ φ with
    f̂ = (f∘T_H)/H^w, w = n + 2 or 2n.
    """
    corrupt = Corruption(corrupt)
    hq = _quadratic(h, "dual-weak")
    n = hq.n
    if exponent not in ("2", "n"):
        raise UnsupportedConfiguration(f"exponent must be '2' or 'n', got {exponent!r}")
    p = 2.0 if exponent == "2" else float(n)
    weight = (n + 2 if exponent == "2" else 2 * n) + (1 if corrupt is Corruption.EXPONENT else 0)
    phi = phi or BumpFunction(np.eye(n)[0] * 1.5, 1.0)
    if float(np.linalg.norm(phi.center)) <= phi.radius:
        raise UnsupportedConfiguration(
            f"test function support must exclude the origin: |center| = "
            f"{np.linalg.norm(phi.center):g} <= radius {phi.radius:g}"
        )
    cfg = (cfg or OperatorConfig()).with_p(p)
    tol = tolerance if tolerance is not None else default_tolerance(cfg, u)
    kmap = KelvinMap(hq.dual() if corrupt is Corruption.MATRIX else hq)
    v = hat_transform(u, kmap) if exponent == "2" else star_transform(u, kmap)

    def source(x: np.ndarray) -> float:
        return -finsler_p_laplacian(hq, cfg, u, kelvin_point(kmap, x)) / hq.value(x) ** weight

    f_hat = ScalarField(n=n, value=source, domain=Domain.PUNCTURED, label=f"source({u.label})")

    logger.info("dual-weak: %s, p=%g, field %s, density %d", hq.spec, p, u.label, quad_density)
    terms = weak_form_terms(hq.dual(), p, v, f_hat, phi, quad_density)
    table = ResidualTable()
    table.add(phi.center, terms.flux_term, terms.source_term,
              scale=max(terms.scale, terms.flux_scale), label="weak")
    return _finish(
        table.report(
            check="dual-weak",
            norm=hq.spec,
            n=n,
            p=p,
            tolerance=tol,
            corrupt=corrupt.value,
            extras={
                "field": u.label,
                "transform": "hat" if exponent == "2" else "star",
                "weight": weight,
                "quad_density": quad_density,
                "source_scale": terms.scale,
            },
        )
    )


# -- Wulff balls ------------------------------------------------------------

def _padded(center: Sequence[float], n: int) -> np.ndarray:
    c = np.zeros(n)
    c[: min(n, len(center))] = center[:n]
    return c


def check_mvp(
    h: Norm,
    hpoly: Polynomial,
    centers: Optional[Sequence] = None,
    radii: Sequence[float] = DEFAULT_MVP_RADII,
    quad_density: int = 128,
    *,
    tolerance: float = ANALYTIC_TOL,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """Volume and anisotropic-surface averages of u = h∘B⁻¹ over Wulff balls
    against u(center). Constant fields must be reproduced to 1e-12.
    """
    corrupt = Corruption(corrupt)
    hq = _quadratic(h, "mvp")
    n = hq.n
    if hpoly.n != n:
        raise DimensionMismatch(f"polynomial in {hpoly.n} variables for a norm on R^{n}")
    if quad_density < 64:
        raise UnsupportedConfiguration(f"mvp needs quad_density >= 64, got {quad_density}")
    if not radii or any(r <= 0.0 for r in radii):
        raise UnsupportedConfiguration(f"radii must be positive, got {list(radii)}")
    centers = [_padded(c, n) for c in DEFAULT_MVP_CENTERS] if centers is None else [
        np.asarray(c, dtype=float) for c in centers
    ]

    u = make_harmonic_pullback(hpoly, sqrt_spd(hq.matrix))
    hstar = hq.dual()
    ball_norm = hq if corrupt is Corruption.MATRIX else hstar
    kappa_factor = unit_ball_volume(n) / unit_ball_volume(n + 1) if corrupt is Corruption.EXPONENT else 1.0
    one = make_constant(1.0, n)

    logger.info("mvp: %s, field %s, %d balls", hq.spec, u.label, len(centers) * len(radii))
    table, normalization = ResidualTable(), ResidualTable()
    discrepancy = 0.0
    for c in centers:
        target = u(c)
        for r in radii:
            ball = WulffBall(c, r, ball_norm)
            vol = volume_average(u, ball, quad_density)
            surf = surface_average(u, ball, quad_density)
            table.add(c, kappa_factor * vol.value, target, scale=vol.magnitude, label=f"volume r={r:g}")
            table.add(c, kappa_factor * surf.value, target, scale=surf.magnitude, label=f"surface r={r:g}")
            euclid = surface_average(u, ball, quad_density, measure="euclidean")
            discrepancy = max(discrepancy, relative_residual(euclid.value, target, euclid.magnitude))
            normalization.add(c, kappa_factor * volume_average(one, ball, quad_density).value, 1.0,
                              label=f"volume r={r:g}")
            normalization.add(c, kappa_factor * surface_average(one, ball, quad_density).value, 1.0,
                              label=f"surface r={r:g}")
    return _finish(
        table.report(
            check="mvp",
            norm=hq.spec,
            n=n,
            tolerance=tolerance,
            corrupt=corrupt.value,
            sub_checks=[normalization.sub_check("constant normalization", NORMALIZATION_TOL)],
            extras={
                "field": u.label,
                "kappa": wulff_kappa(hstar, n),
                "centers": [c.tolist() for c in centers],
                "radii": [float(r) for r in radii],
                "quad_density": quad_density,
                "euclidean_measure_discrepancy": discrepancy,
            },
        )
    )


# -- Liouville --------------------------------------------------------------

def liouville_mass_integral(
    hstar: Norm,
    alpha: float = 0.0,
    scale: float = 1.0,
    extent: float = 200.0,
    density: int = 2048,
    chunk: int = 256,
) -> float:
    """Midpoint rule for ∫ H*(x)^α e^{u(x)} dx over [−L, L]²."""
    u = make_liouville_profile(hstar, alpha=alpha, scale=scale)
    unit = (np.arange(density) + 0.5) / density * 2.0 - 1.0
    axis = extent * 0.5 * (unit - unit[::-1])
    cell = (2.0 * extent / density) ** 2
    total = 0.0
    for start in range(0, density, chunk):
        rows = axis[start : start + chunk]
        xs = np.column_stack([np.repeat(rows, density), np.tile(axis, len(rows))])
        values = np.exp(u.evaluate_many(xs))
        if alpha != 0.0:
            values *= hstar.values(xs) ** alpha
        total += float(np.sum(values))
    return total * cell


def check_liouville(
    h: Norm,
    s: Optional[SampleSpec] = None,
    quad_extent: float = 200.0,
    quad_density: int = 2048,
    *,
    alpha: float = 0.0,
    scale: float = 1.0,
    cfg: Optional[OperatorConfig] = None,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
    parallel: bool = False,
) -> VerificationReport:
    """Pointwise Δ^H u = −H*(x)^α e^u for the radial profile, and its total
    mass 4π(α+2)·det(B) (8π·det(B) at α = 0).

    The mass is the midpoint quadrature over [−L, L]² plus the mean of the
    analytic tails outside the inscribed and circumscribed Wulff balls.
    """
    corrupt = Corruption(corrupt)
    hq = _quadratic(h, "liouville")
    if hq.n != 2:
        raise DimensionMismatch(f"liouville runs in R^2, got n={hq.n}")
    hstar = hq.dual()
    u = make_liouville_profile(hstar, alpha=alpha, scale=scale)
    s = _samples(s, "liouville")
    if alpha != 0.0:
        s = s.excluding(lambda x: float(np.linalg.norm(x)) < ORIGIN_EXCLUSION)
    cfg = (cfg or OperatorConfig()).with_p(2.0)
    tol = tolerance if tolerance is not None else default_tolerance(cfg, u)
    op_norm = hstar if corrupt is Corruption.MATRIX else hq
    weight = alpha + 1.0 if corrupt is Corruption.EXPONENT else alpha

    logger.info("liouville: %s, alpha=%g, %d samples", hq.spec, alpha, s.count)
    points = s.points(2)

    def evaluate(x: np.ndarray):
        left = finsler_p_laplacian_terms(op_norm, cfg, u, x)
        return left, -(hstar.value(x) ** weight) * math.exp(u(x))

    table = ResidualTable()
    for x, (left, rhs) in zip(points, _map(evaluate, points, parallel)):
        table.add(x, left.value, rhs, scale=left.magnitude)

    det_b = hq.matrix.sqrt_det
    quadrature = liouville_mass_integral(hstar, alpha, scale, quad_extent, quad_density)
    r_in = quad_extent / float(np.max(np.sqrt(np.diag(hq.matrix.entries))))
    corners = np.array([[sx, sy] for sx in (-1, 1) for sy in (-1, 1)]) * quad_extent
    r_out = float(np.max(hstar.values(corners)))
    tail_hi = det_b * liouville_tail(scale * r_in, alpha)
    tail_lo = det_b * liouville_tail(scale * r_out, alpha)
    mass = quadrature + 0.5 * (tail_lo + tail_hi)
    target = det_b * liouville_mass(alpha)

    mass_check = ResidualTable()
    mass_check.add(np.zeros(2), mass, target)
    return _finish(
        table.report(
            check="liouville",
            norm=hq.spec,
            n=2,
            p=2.0,
            tolerance=tol,
            seed=s.seed,
            fd_step=_nominal_step(cfg, u),
            corrupt=corrupt.value,
            sub_checks=[mass_check.sub_check("total mass", MASS_RTOL)],
            extras={
                "alpha": alpha,
                "scale": scale,
                "mass": mass,
                "mass_target": target,
                "mass_quadrature": quadrature,
                "mass_bounds": [quadrature + tail_lo, quadrature + tail_hi],
                "quad_extent": quad_extent,
                "quad_density": quad_density,
            },
        )
    )


# -- norm classification ----------------------------------------------------

def _pairing(h: Norm, hstar: Norm, x: np.ndarray, y: np.ndarray) -> float:
    return float((h.value(x) * h.gradient(x)) @ (hstar.value(y) * hstar.gradient(y)))


def _corrupted_dual(h: Norm, points: np.ndarray) -> Norm:
    """H standing in for H*, or 2·Id when H is its own dual."""
    if np.allclose(h.dual().values(points), h.values(points), rtol=1e-12, atol=0.0):
        return quadratic(2.0 * np.eye(h.n))
    return h


def classify_norm(
    h: Norm,
    s: Optional[SampleSpec] = None,
    *,
    tolerance: float = FK_TOL,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """Decide whether H is quadratic from Hessian constancy and cross-check
    with the pairing identity ⟨H(x)∇H(x), H*(y)∇H*(y)⟩ = ⟨x, y⟩.

    The report passes when the two verdicts agree: a recovered M with every
    pairing residual within ``tolerance``, or no M with some residual above it.
    """
    corrupt = Corruption(corrupt)
    if corrupt is Corruption.EXPONENT:
        raise UnsupportedConfiguration("classify has no exponent to corrupt")
    n = h.n
    s = _samples(s, "classify").excluding(avoid_coordinate_planes())
    points = s.points(n)
    logger.info("classify: %s, %d samples", h.spec, len(points))

    recovered = recover_quadratic(h, points)
    hstar = _corrupted_dual(h, points) if corrupt is Corruption.MATRIX else h.dual()
    canonical = (np.ones(n), np.eye(n)[0])
    pairs = [canonical] + [(points[i], points[(i + 1) % len(points)]) for i in range(len(points))]

    table = ResidualTable()
    for i, (x, y) in enumerate(pairs):
        inner = float(x @ y)
        if corrupt is Corruption.NONE:
            lhs = check_fk_condition(h, x, y) + inner
        else:
            lhs = _pairing(h, hstar, x, y)
        table.add(np.concatenate([x, y]), lhs, inner, scale=1.0, label="canonical" if i == 0 else "pair")

    is_quadratic = recovered is not None
    consistent = (is_quadratic and table.max_rel <= tolerance) or (not is_quadratic and table.max_rel > tolerance)
    worst = table.worst(1)[0]
    report = table.report(
        check="classify",
        norm=h.spec,
        n=n,
        tolerance=tolerance,
        seed=s.seed,
        corrupt=corrupt.value,
        extras={
            "quadratic": is_quadratic,
            "recovered_matrix": recovered.tolist() if recovered is not None else None,
            "max_fk_violation": table.max_abs,
            "worst_pair": {"x": worst.x[:n], "y": worst.x[n:], "residual": worst.lhs - worst.rhs},
        },
    )
    return _finish(report.model_copy(update={"passed": consistent}))


# -- pointwise evaluation ---------------------------------------------------

def check_dual_norm(
    h: Norm,
    s: Optional[SampleSpec] = None,
    grid_density: int = 256,
    *,
    points: Optional[np.ndarray] = None,
    tolerance: float = DUAL_TOL,
    corrupt: Corruption | str = Corruption.NONE,
) -> VerificationReport:
    """H*(x) from the support-function definition against the closed form."""
    corrupt = Corruption(corrupt)
    if corrupt is Corruption.EXPONENT:
        raise UnsupportedConfiguration("dual has no exponent to corrupt")
    s = _samples(s, "dual")
    closed = h if corrupt is Corruption.MATRIX else h.dual()
    pts = s.points(h.n) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    logger.info("dual: %s, %d points, grid density %d", h.spec, len(pts), grid_density)

    table = ResidualTable()
    for x in pts:
        table.add(x, dual_eval_numeric(h, x, grid_density), closed.value(x))
    return _finish(
        table.report(
            check="dual",
            norm=h.spec,
            n=h.n,
            tolerance=tolerance,
            seed=s.seed if points is None else None,
            corrupt=corrupt.value,
            extras={"dual_norm": h.dual().spec, "grid_density": grid_density},
        )
    )


def evaluate_operator(
    h: Norm,
    u: ScalarField,
    s: Optional[SampleSpec] = None,
    cfg: Optional[OperatorConfig] = None,
    *,
    points: Optional[np.ndarray] = None,
    tolerance: Optional[float] = None,
    corrupt: Corruption | str = Corruption.NONE,
    parallel: bool = False,
) -> VerificationReport:
    """Δ_p^H u at each point; the right side repeats the evaluation at half
    the divergence step, so the residual measures discretization error.
    """
    corrupt = Corruption(corrupt)
    cfg = cfg or OperatorConfig()
    tol = tolerance if tolerance is not None else default_tolerance(cfg, u)
    right_norm = h.dual() if corrupt is Corruption.MATRIX else h
    right_cfg = cfg.with_p(cfg.p + 1.0) if corrupt is Corruption.EXPONENT else cfg
    if points is None:
        s = _samples(s, "op")
        if cfg.p != 2.0:
            s = s.excluding(_avoid_critical(u))
        pts = s.points(u.n)
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
    logger.info("op: %s, p=%g, field %s, %d points", h.spec, cfg.p, u.label, len(pts))

    def evaluate(x: np.ndarray):
        left = finsler_p_laplacian_terms(h, cfg, u, x)
        halved = right_cfg.with_step(cfg.step(u, x) / 2.0)
        return left, finsler_p_laplacian_terms(right_norm, halved, u, x)

    table = ResidualTable()
    for x, (left, right) in zip(pts, _map(evaluate, pts, parallel)):
        table.add(x, left.value, right.value, scale=max(left.magnitude, right.magnitude))
    return _finish(
        table.report(
            check="op",
            norm=h.spec,
            n=u.n,
            p=cfg.p,
            tolerance=tol,
            seed=s.seed if points is None else None,
            fd_step=_nominal_step(cfg, u),
            corrupt=corrupt.value,
            extras={"field": u.label, "grad_mode": cfg.grad_mode},
        )
    )


__all__ = [
    "Corruption",
    "FIELD_SUITE",
    "DEFAULT_ANNULI",
    "builtin_field_suite",
    "default_tolerance",
    "check_theorem1",
    "check_theorem1_weak",
    "check_kelvin_p2",
    "check_kelvin_pn",
    "check_kelvin_algebra",
    "check_dual_weak",
    "check_mvp",
    "check_liouville",
    "liouville_mass_integral",
    "classify_norm",
    "check_dual_norm",
    "evaluate_operator",
]
