import numpy as np
import pytest
from scipy.stats import ortho_group

from finsler.errors import DimensionMismatch, NonFinite, NotPositiveDefinite, NotSquare
from finsler.spd import identity, inverse_spd, sqrt_spd, validate_spd


def _random_spd(rng, n):
    g = rng.standard_normal((n, n))
    return g @ g.T + 0.5 * np.eye(n)


def _conditioned_spd(rng, n, condition=1e6):
    q = ortho_group.rvs(n, random_state=rng)
    exponents = np.sort(rng.uniform(0.0, np.log10(condition), n))
    exponents[0], exponents[-1] = 0.0, np.log10(condition)
    return q @ np.diag(10.0**exponents) @ q.T


def test_diagonal_matrix_decomposition():
    m = validate_spd([[4.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(m.sqrt, np.diag([2.0, 1.0]), atol=1e-15)
    np.testing.assert_allclose(m.inverse, np.diag([0.25, 1.0]), atol=1e-15)
    np.testing.assert_allclose(m.eigenvalues, [1.0, 4.0])
    assert m.sqrt_det == pytest.approx(2.0)
    assert m.condition == pytest.approx(4.0)


def test_square_root_over_seeded_matrices(rng):
    for k in range(1000):
        n = 2 + k % 4
        raw = _random_spd(rng, n)
        m = validate_spd(raw)
        b = m.sqrt
        scale = np.linalg.norm(raw)
        assert np.linalg.norm(b @ b - raw) <= 1e-10 * scale
        np.testing.assert_allclose(b, b.T, atol=1e-14 * scale)
        assert np.linalg.norm(b @ raw - raw @ b) <= 1e-10 * scale**1.5
        assert np.linalg.norm(m.inverse @ raw - np.eye(n)) <= 1e-10 * m.condition


def test_input_is_symmetrized():
    m = validate_spd([[2.0, 1.0], [0.0, 2.0]])
    np.testing.assert_array_equal(m.entries, [[2.0, 0.5], [0.5, 2.0]])


def test_double_inversion_reproduces_entries(rng):
    m = validate_spd(_random_spd(rng, 3))
    back = m.inverted().inverted()
    np.testing.assert_array_equal(back.entries, m.entries)
    np.testing.assert_array_equal(back.inverse, m.inverse)


def test_inverted_eigenvalues_stay_sorted(rng):
    m = validate_spd(_random_spd(rng, 4))
    inv = m.inverted()
    assert np.all(np.diff(inv.eigenvalues) >= 0.0)
    np.testing.assert_allclose(inv.entries @ m.entries, np.eye(4), atol=1e-9 * m.condition)


def test_sqrt_spd_is_itself_spd():
    m = validate_spd([[5.0, 3.0], [3.0, 5.0]])
    b = sqrt_spd(m)
    np.testing.assert_array_equal(b.entries, m.sqrt)
    np.testing.assert_allclose(b.entries @ b.entries, m.entries, rtol=1e-12)
    np.testing.assert_allclose(b.eigenvalues, [np.sqrt(2.0), np.sqrt(8.0)])


def test_inverse_spd_and_identity():
    np.testing.assert_allclose(inverse_spd(identity(3)), np.eye(3), atol=1e-15)
    assert identity(2).sqrt_det == pytest.approx(1.0)


@pytest.mark.parametrize(
    "raw, error",
    [
        ([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], NotSquare),
        ([[1.0, np.nan], [np.nan, 1.0]], NonFinite),
        ([[1.0, 2.0], [2.0, 1.0]], NotPositiveDefinite),
        ([[0.0, 0.0], [0.0, 0.0]], NotPositiveDefinite),
        ([[1.0]], DimensionMismatch),
        (np.eye(9), DimensionMismatch),
        ([["a", "b"], ["c", "d"]], NotSquare),
    ],
)
def test_rejects_invalid_matrices(raw, error):
    with pytest.raises(error):
        validate_spd(raw)


def test_not_positive_definite_reports_eigenvalue():
    with pytest.raises(NotPositiveDefinite) as excinfo:
        validate_spd([[1.0, 2.0], [2.0, 1.0]])
    assert excinfo.value.smallest_eigenvalue == pytest.approx(-1.0)
    assert "-1" in str(excinfo.value)


def test_near_singular_matrix_is_rejected_not_regularized():
    with pytest.raises(NotPositiveDefinite):
        validate_spd([[1.0, 0.0], [0.0, 1e-14]])


def test_arrays_are_read_only():
    m = validate_spd([[4.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        m.entries[0, 0] = 1.0


def test_square_root_of_square_on_ill_conditioned_matrices(rng):
    for k in range(200):
        m = validate_spd(_conditioned_spd(rng, 2 + k % 4))
        assert m.condition == pytest.approx(1e6, rel=1e-6)
        b = sqrt_spd(m).entries
        again = sqrt_spd(validate_spd(b @ b)).entries
        assert np.linalg.norm(again - b) <= 1e-10 * np.linalg.norm(b)


def test_inverse_and_square_root_commute(rng):
    for k in range(200):
        m = validate_spd(_conditioned_spd(rng, 2 + k % 4))
        left = inverse_spd(sqrt_spd(m))
        right = sqrt_spd(validate_spd(inverse_spd(m))).entries
        assert np.linalg.norm(left - right) <= 1e-9 * np.linalg.norm(right)
