import numpy as np
import pytest

from finsler.errors import NotHarmonic, SpecParseError, UnsupportedNorm
from finsler.fields import Domain
from finsler.norms import QNorm, QuadraticNorm
from finsler.specs import (
    parse_field,
    parse_floats,
    parse_matrix,
    parse_norm,
    parse_points,
    parse_polynomial,
)


@pytest.mark.parametrize("text", ["[[4,0],[0,1]]", "4,0;0,1", " 4, 0 ; 0, 1 "])
def test_matrix_syntaxes(text):
    np.testing.assert_array_equal(parse_matrix(text), [[4.0, 0.0], [0.0, 1.0]])


def test_norm_kinds():
    h = parse_norm("quad:[[4,0],[0,1]]")
    assert isinstance(h, QuadraticNorm)
    assert h.spec == "quad:[[4,0],[0,1]]"
    assert parse_norm("q:4", 3) == QNorm(4.0, 3)
    assert parse_norm("euclidean", 3).n == 3
    assert parse_norm("euclidean").n == 2


@pytest.mark.parametrize(
    "text, n, position",
    [
        ("cube:3", None, 0),
        ("q:abc", None, 2),
        ("q:0.5", None, 2),
        ("quad:4,x;0,1", None, 7),
        ("quad:[[4,0],[0,]]", None, 15),
        ("quad:4,0;0,1", 3, 5),
        ("euclidean:2", None, 0),
    ],
)
def test_norm_errors_carry_position(text, n, position):
    with pytest.raises(SpecParseError) as info:
        parse_norm(text, n)
    assert info.value.position == position
    assert info.value.text == text


def test_polynomial_terms():
    p = parse_polynomial("3*y1^2*y2 - 2.5*x2 + 4", 2)
    assert p.table() == {(0, 0): 4.0, (0, 1): -2.5, (2, 1): 3.0}
    assert parse_polynomial("-y1+1e-3*y2", 2).table() == {(0, 1): 1e-3, (1, 0): -1.0}


@pytest.mark.parametrize(
    "text, position",
    [("y1^2+y3", 5), ("2y1", 1), ("y1+", 3), ("y1**2", 3)],
)
def test_polynomial_errors(text, position):
    with pytest.raises(SpecParseError) as info:
        parse_polynomial(text, 2)
    assert info.value.position == position


def test_polynomial_error_inside_field_spec():
    with pytest.raises(SpecParseError) as info:
        parse_field("poly:y1^2+y3", 2)
    assert info.value.position == 10


def test_field_kinds(diag41):
    assert parse_field("poly:y1^2+y2^2", 2)([1.0, 2.0]) == 5.0
    assert parse_field("constant:2.5", 3)([0.0, 0.0, 0.0]) == 2.5
    assert parse_field("exp:0.5", 2).label == "exp:0.5,0"
    assert parse_field("log-norm", 2).domain is Domain.PUNCTURED
    assert parse_field("bump", 2)([0.0, 0.0]) == pytest.approx(np.exp(-1.0))
    assert parse_field("liouville", 2, diag41)([0.0, 0.0]) == pytest.approx(0.0)
    u = parse_field("harmonic-pullback:y1^2-y2^2", 2, diag41)
    assert u([1.0, 1.0]) == pytest.approx(-0.75)


def test_field_errors(diag41, q4):
    with pytest.raises(SpecParseError):
        parse_field("exp:1,2,3", 2)
    with pytest.raises(SpecParseError) as info:
        parse_field("wave:1", 2)
    assert info.value.position == 0
    with pytest.raises(UnsupportedNorm):
        parse_field("harmonic-pullback:y1^2-y2^2", 2, q4)
    with pytest.raises(NotHarmonic):
        parse_field("harmonic-pullback:y1^2+y2^2", 2, diag41)
    with pytest.raises(UnsupportedNorm):
        parse_field("liouville", 2)


def test_points_and_floats():
    np.testing.assert_array_equal(parse_points("1,1;2,0", 2), [[1.0, 1.0], [2.0, 0.0]])
    assert parse_floats("0.1, 0.5") == [0.1, 0.5]
    with pytest.raises(SpecParseError) as info:
        parse_points("1,1;2", 2)
    assert info.value.position == 4
