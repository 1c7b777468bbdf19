import math

import numpy as np
import pytest

from finsler.errors import DimensionMismatch, NotHarmonic, OutOfDomain, UnsupportedConfiguration
from finsler.fields import (
    BumpFunction,
    Domain,
    Polynomial,
    default_step,
    fd_divergence,
    fd_divergence_terms,
    fd_gradient,
    liouville_mass,
    liouville_tail,
    make_constant,
    make_exponential,
    make_harmonic_pullback,
    make_liouville_profile,
    make_log_norm,
    make_polynomial,
)
from finsler.norms import euclidean
from finsler.operators import OperatorConfig, finsler_p_laplacian_terms
from finsler.spd import sqrt_spd


def test_polynomial_value_and_gradient():
    u = make_polynomial({(2, 0): 1.0, (0, 2): 1.0}, 2)
    assert u([1.0, 2.0]) == 5.0
    np.testing.assert_allclose(u.grad([1.0, 2.0]), [2.0, 4.0])
    assert u.has_gradient


def test_polynomial_drops_zero_terms():
    p = Polynomial.from_table({(1, 0): 0.0, (0, 1): 1.0}, 2)
    assert p.table() == {(0, 1): 1.0}
    assert p.degree == 1


def test_polynomial_rejects_bad_tables():
    with pytest.raises(DimensionMismatch):
        Polynomial.from_table({(1, 0, 0): 1.0}, 2)
    with pytest.raises(ValueError):
        Polynomial.from_table({(-1, 0): 1.0}, 2)


def test_laplacian_of_polynomials():
    saddle = Polynomial.from_table({(2, 0): 1.0, (0, 2): -1.0}, 2)
    bowl = Polynomial.from_table({(2, 0): 1.0, (0, 2): 1.0}, 2)
    cubic = Polynomial.from_table({(3, 0): 1.0, (1, 2): -3.0}, 2)
    assert saddle.is_harmonic()
    assert cubic.is_harmonic()
    assert bowl.laplacian().table() == {(0, 0): 4.0}


def test_batch_matches_pointwise(rng):
    p = Polynomial.from_table({(3, 0): 1.0, (1, 1): 1.0, (0, 1): 1.0}, 2)
    pts = rng.standard_normal((10, 2))
    np.testing.assert_allclose(p.evaluate_many(pts), [p(y) for y in pts], rtol=1e-14)


def test_fd_gradient_agrees_with_analytic(rng):
    u = make_polynomial({(3, 0): 1.0, (1, 1): 1.0, (0, 1): 1.0}, 2)
    for x in rng.standard_normal((10, 2)):
        np.testing.assert_allclose(fd_gradient(u, x, default_step(x)), u.grad(x), rtol=1e-8, atol=1e-9)


def test_fd_divergence_of_identity_field():
    terms = fd_divergence_terms(lambda y: y, np.array([0.3, -0.7]), 1e-3)
    assert terms.value == pytest.approx(2.0)
    assert terms.magnitude == pytest.approx(2.0)
    assert terms.flux_size == pytest.approx(np.hypot(0.3 + 1e-3, 0.7), rel=1e-2)
    assert fd_divergence(lambda y: y, np.array([1.0, 1.0, 1.0]), 1e-3) == pytest.approx(3.0)


def test_fd_steps_must_be_positive():
    u = make_constant(1.0, 2)
    with pytest.raises(ValueError):
        fd_gradient(u, [0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        fd_divergence(lambda y: y, np.zeros(2), -1.0)


def test_step_policy():
    assert default_step(np.array([3.0, 4.0])) == pytest.approx(6e-5)
    assert default_step(np.zeros(2), 1e-4) == pytest.approx(1e-4)


def test_harmonic_pullback(diag41):
    h = Polynomial.from_table({(2, 0): 1.0, (0, 2): -1.0}, 2)
    u = make_harmonic_pullback(h, sqrt_spd(diag41.matrix))
    assert u([1.0, 1.0]) == pytest.approx(-0.75)
    np.testing.assert_allclose(u.grad([1.0, 1.0]), [0.5, -2.0])
    with pytest.raises(NotHarmonic):
        make_harmonic_pullback(Polynomial.from_table({(2, 0): 1.0}, 2), sqrt_spd(diag41.matrix))


@pytest.mark.parametrize(
    "table",
    [
        {(2, 0): 1.0, (0, 2): -1.0},
        {(3, 0): 1.0, (1, 2): -3.0},
        {(4, 0): 1.0, (2, 2): -6.0, (0, 4): 1.0, (1, 1): 2.0},
    ],
    ids=["saddle", "cubic", "quartic"],
)
def test_harmonic_pullback_is_anisotropic_harmonic(table, diag41, sym53, rng):
    poly = Polynomial.from_table(table, 2)
    cfg = OperatorConfig()
    for h in (diag41, sym53):
        u = make_harmonic_pullback(poly, sqrt_spd(h.matrix))
        for x in rng.uniform(-2.0, 2.0, size=(100, 2)):
            terms = finsler_p_laplacian_terms(h, cfg, u, x)
            assert abs(terms.value) <= 1e-7 * max(terms.magnitude, 1.0)


def test_exponential_and_constant():
    u = make_exponential([0.3, -0.2])
    assert u([1.0, 1.0]) == pytest.approx(math.exp(0.1))
    np.testing.assert_allclose(u.grad([1.0, 1.0]), math.exp(0.1) * np.array([0.3, -0.2]))
    c = make_constant(3.0, 3)
    assert c([1.0, 2.0, 3.0]) == 3.0
    np.testing.assert_array_equal(c.evaluate_many(np.ones((4, 3))), [3.0] * 4)


def test_log_norm_domain():
    u = make_log_norm(2)
    assert u.domain is Domain.PUNCTURED
    assert u([3.0, 4.0]) == pytest.approx(math.log(5.0))
    np.testing.assert_allclose(u.grad([3.0, 4.0]), [3.0 / 25.0, 4.0 / 25.0])
    with pytest.raises(OutOfDomain):
        u([0.0, 0.0])
    with pytest.raises(OutOfDomain):
        fd_gradient(u, [1e-6, 0.0], 1e-5)


def test_dimension_checked():
    u = make_constant(1.0, 2)
    with pytest.raises(DimensionMismatch):
        u([1.0, 2.0, 3.0])


def test_liouville_profile_isotropic():
    u = make_liouville_profile(euclidean(2))
    assert u([0.0, 0.0]) == 0.0
    assert u([1.0, 2.0]) == pytest.approx(-2.0 * math.log(1.0 + 5.0 / 8.0))
    np.testing.assert_allclose(u.grad([0.0, 0.0]), [0.0, 0.0])
    x = np.array([0.4, -1.1])
    np.testing.assert_allclose(u.grad(x), fd_gradient(u, x, 1e-6), rtol=1e-7)


def test_liouville_profile_scaled_and_weighted(diag41):
    hstar = diag41.dual()
    u = make_liouville_profile(hstar, alpha=0.0, scale=2.0)
    x = np.array([0.3, 0.5])
    expected = -2.0 * math.log(1.0 + hstar.value(2.0 * x) ** 2 / 8.0) + 2.0 * math.log(2.0)
    assert u(x) == pytest.approx(expected)
    weighted = make_liouville_profile(hstar, alpha=1.0)
    assert weighted.domain is Domain.PUNCTURED
    np.testing.assert_allclose(weighted.grad(x), fd_gradient(weighted, x, 1e-6), rtol=1e-7)


def test_liouville_profile_rejections(diag411):
    with pytest.raises(DimensionMismatch):
        make_liouville_profile(diag411)
    with pytest.raises(UnsupportedConfiguration):
        make_liouville_profile(euclidean(2), alpha=-2.0)
    with pytest.raises(UnsupportedConfiguration):
        make_liouville_profile(euclidean(2), alpha=1.0, center=[1.0, 0.0])


def test_liouville_mass_constants():
    assert liouville_mass() == pytest.approx(8.0 * math.pi)
    assert liouville_mass(1.0) == pytest.approx(12.0 * math.pi)
    assert liouville_tail(0.0) == pytest.approx(8.0 * math.pi)
    assert liouville_tail(200.0) == pytest.approx(8.0 * math.pi / (1.0 + 5000.0))


def test_bump_function():
    phi = BumpFunction(np.array([1.0, 0.0]), 0.5)
    assert phi([1.0, 0.0]) == pytest.approx(math.exp(-1.0))
    assert phi([2.0, 0.0]) == 0.0
    np.testing.assert_array_equal(phi.gradient([2.0, 0.0]), [0.0, 0.0])
    x = np.array([1.2, 0.1])
    np.testing.assert_allclose(phi.gradient(x), fd_gradient(phi.field, x, 1e-7), rtol=1e-6)
    pts = np.array([[1.0, 0.0], [1.2, 0.1], [3.0, 3.0]])
    np.testing.assert_allclose(phi.batch(pts), [phi(p) for p in pts])
    lo, hi = phi.bounding_box()
    np.testing.assert_allclose(lo, [0.5, -0.5])
    np.testing.assert_allclose(hi, [1.5, 0.5])
    with pytest.raises(ValueError):
        BumpFunction(np.zeros(2), 0.0)


def test_field_labels():
    assert make_log_norm(2).label == "log-norm"
    assert make_exponential([0.5, 0.0]).label == "exp:0.5,0"
