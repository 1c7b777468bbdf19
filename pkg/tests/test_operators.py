import numpy as np
import pytest
from pydantic import ValidationError

from finsler.errors import DegenerateGradient, DimensionMismatch
from finsler.fields import BumpFunction, ScalarField, make_constant, make_exponential, make_polynomial
from finsler.norms import QNorm, euclidean, quadratic
from finsler.operators import (
    OperatorConfig,
    finsler_p_laplacian,
    finsler_p_laplacian_terms,
    flux,
    midpoint_grid,
    p_laplacian,
    p_laplacian_terms,
    weak_form_integrals,
    weak_form_residual,
    weak_form_terms,
)

BOWL = {(2, 0): 1.0, (0, 2): 1.0}


def test_quadratic_norm_of_bowl_is_trace(diag41, rng):
    u = make_polynomial(BOWL, 2)
    cfg = OperatorConfig()
    for x in rng.uniform(-2.0, 2.0, size=(10, 2)):
        assert finsler_p_laplacian(diag41, cfg, u, x) == pytest.approx(10.0, rel=1e-8)


def test_isotropic_laplacian():
    u = make_polynomial(BOWL, 2)
    assert p_laplacian(OperatorConfig(), u, [0.3, -0.4]) == pytest.approx(4.0, rel=1e-8)


def test_linear_field_with_p4(sym53):
    u = make_polynomial({(1, 0): 1.0, (0, 1): -2.0}, 2)
    assert abs(finsler_p_laplacian(sym53, OperatorConfig(p=4.0), u, [0.5, 1.5])) <= 1e-10


def test_q2_norm_matches_euclidean(rng):
    u = make_polynomial({(3, 0): 1.0, (1, 1): 2.0}, 2)
    cfg = OperatorConfig(p=3.0)
    for x in rng.uniform(-1.0, 1.0, size=(5, 2)) + 2.0:
        assert finsler_p_laplacian(QNorm(2.0, 2), cfg, u, x) == pytest.approx(
            finsler_p_laplacian(euclidean(2), cfg, u, x), rel=1e-9
        )


def test_nested_differences_agree(diag41):
    u = make_polynomial(BOWL, 2)
    cfg = OperatorConfig(grad_mode="finite-difference")
    assert cfg.nested(u)
    assert finsler_p_laplacian(diag41, cfg, u, [0.7, -0.2]) == pytest.approx(10.0, abs=1e-3)


def test_field_without_gradient_uses_nested_path(diag41):
    bare = ScalarField(n=2, value=lambda y: float(y @ y), label="bare")
    cfg = OperatorConfig()
    assert cfg.nested(bare)
    assert cfg.step(bare, np.zeros(2)) == pytest.approx(1e-4)
    assert finsler_p_laplacian(diag41, cfg, bare, [0.7, -0.2]) == pytest.approx(10.0, abs=1e-3)


def test_terms_carry_scale(diag41):
    terms = finsler_p_laplacian_terms(diag41, OperatorConfig(), make_polynomial(BOWL, 2), [1.0, 1.0])
    assert terms.magnitude == pytest.approx(10.0, rel=1e-6)
    assert terms.flux_size > 0.0


def test_flux_at_degenerate_gradient(diag41):
    np.testing.assert_array_equal(flux(diag41, 2.0, [0.0, 0.0]), [0.0, 0.0])
    np.testing.assert_array_equal(flux(diag41, 3.0, [0.0, 0.0]), [0.0, 0.0])
    with pytest.raises(DegenerateGradient):
        flux(diag41, 1.5, [0.0, 0.0])
    with pytest.raises(DegenerateGradient):
        flux(diag41, 2.0, [np.nan, 0.0])


def test_degenerate_gradient_with_small_p(diag41):
    with pytest.raises(DegenerateGradient):
        finsler_p_laplacian(diag41, OperatorConfig(p=1.5), make_constant(1.0, 2), [0.5, 0.5])


def test_dimension_mismatch(diag411):
    with pytest.raises(DimensionMismatch):
        finsler_p_laplacian(diag411, OperatorConfig(), make_polynomial(BOWL, 2), [1.0, 1.0])


@pytest.mark.parametrize(
    "kwargs",
    [{"p": 1.0}, {"p": 0.5}, {"h_flux": 0.0}, {"grad_mode": "spectral"}, {"degenerate_tol": -1.0}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        OperatorConfig(**kwargs)


def test_config_copies():
    cfg = OperatorConfig()
    assert cfg.with_p(3).p == 3.0
    assert cfg.with_step(1e-3).h_flux == 1e-3
    assert cfg.p == 2.0
    with pytest.raises(ValidationError):
        cfg.p = 4.0


def test_midpoint_grid():
    points, cell = midpoint_grid(np.array([0.0, -1.0]), np.array([1.0, 1.0]), 4)
    assert points.shape == (16, 2)
    assert cell == pytest.approx(0.125)
    np.testing.assert_allclose(points.mean(axis=0), [0.5, 0.0], atol=1e-15)
    assert points[:, 0].min() == pytest.approx(0.125)


def test_weak_form_manufactured_pair(diag41):
    u = make_polynomial(BOWL, 2)
    f = make_constant(-10.0, 2)
    phi = BumpFunction(np.array([0.3, -0.2]), 1.0)
    terms = weak_form_terms(diag41, 2.0, u, f, phi, quad_density=64)
    assert terms.scale > 0.0
    assert abs(terms.residual) / terms.scale <= 1e-4


def test_weak_form_linear_field_vanishes(sym53):
    u = make_polynomial({(1, 0): 1.0, (0, 1): 1.0}, 2)
    phi = BumpFunction(np.array([2.0, 1.0]), 0.5)
    terms = weak_form_terms(sym53, 3.0, u, None, phi)
    assert terms.source_term == 0.0
    assert abs(terms.residual) <= 1e-12 * max(terms.flux_scale, 1.0)
    assert weak_form_residual(sym53, 3.0, u, None, phi) == terms.residual


def test_weak_form_density_floor(diag41):
    phi = BumpFunction(np.zeros(2), 1.0)
    lo, hi = phi.bounding_box()
    with pytest.raises(ValueError):
        weak_form_integrals(diag41, 2.0, make_polynomial(BOWL, 2), None, phi.field, lo, hi, 16)


def test_halving_the_step_shrinks_the_error(sym53, rng):
    c = np.array([1.0, 0.5])
    u = make_exponential(c)
    cfg = OperatorConfig()
    for x in rng.uniform(-1.0, 1.0, size=(10, 2)):
        exact = float(c @ sym53.matrix.entries @ c) * np.exp(c @ x)
        errors = [
            abs(finsler_p_laplacian(sym53, cfg.with_step(step), u, x) - exact)
            for step in (2e-2, 1e-2, 5e-3)
        ]
        assert errors[0] >= 3.0 * errors[1]
        assert errors[1] >= 3.0 * errors[2]


def test_weak_form_residual_converges_with_density(diag41):
    u = make_polynomial(BOWL, 2)
    f = make_constant(-10.0, 2)
    phi = BumpFunction(np.array([0.3, -0.2]), 1.0)
    scale = weak_form_terms(diag41, 2.0, u, f, phi, quad_density=32).scale
    relative = [
        abs(weak_form_residual(diag41, 2.0, u, f, phi, quad_density=density)) / scale
        for density in (32, 64, 128, 256)
    ]
    for coarse, fine in zip(relative, relative[1:]):
        assert fine <= coarse + 1e-12
    assert relative[-1] <= max(0.1 * relative[0], 1e-12)


def test_identity_norm_reproduces_isotropic_p_laplacian(rng):
    for _ in range(50):
        n = int(rng.integers(2, 4))
        p = float(rng.uniform(1.5, 4.0))
        direction = rng.standard_normal(n)
        c = direction / np.linalg.norm(direction) * rng.uniform(0.5, 1.5)
        x = rng.uniform(-1.0, 1.0, size=n)
        u = make_exponential(c)
        cfg = OperatorConfig(p=p)
        iso = p_laplacian_terms(cfg, u, x)
        aniso = finsler_p_laplacian(quadratic(np.eye(n)), cfg, u, x)
        assert abs(aniso - iso.value) <= 1e-12 * max(iso.magnitude, 1.0)
        exact = (p - 1.0) * np.linalg.norm(c) ** p * np.exp((p - 1.0) * (c @ x))
        assert iso.value == pytest.approx(exact, rel=1e-6)
