import numpy as np
import pytest
from pydantic import ValidationError

from finsler.errors import TooFewSamples
from finsler.sampling import SampleSpec, avoid_coordinate_planes


def test_same_seed_same_points():
    a = SampleSpec(seed=7, count=50).points(3)
    b = SampleSpec(seed=7, count=50).points(3)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, SampleSpec(seed=8, count=50).points(3))


def test_points_lie_in_annulus():
    pts = SampleSpec(seed=1, count=500, r_min=0.5, r_max=2.0).points(2)
    r = np.linalg.norm(pts, axis=1)
    assert pts.shape == (500, 2)
    assert r.min() >= 0.5 - 1e-12
    assert r.max() <= 2.0 + 1e-12


@pytest.mark.parametrize("kwargs", [{"count": 0}, {"r_min": 1.0, "r_max": 1.0}, {"r_min": -0.5}])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        SampleSpec(**kwargs)


def test_exclusions_compose():
    spec = SampleSpec(seed=3, count=200, r_min=0.1, r_max=1.0).excluding(avoid_coordinate_planes(0.05))
    spec = spec.excluding(lambda x: x[0] < 0.0)
    pts = spec.points(2)
    assert len(pts) == 200
    assert np.all(np.abs(pts) >= 0.05)
    assert np.all(pts[:, 0] >= 0.0)


def test_exclusion_that_rejects_everything():
    with pytest.raises(TooFewSamples):
        SampleSpec(count=5).with_exclusion(lambda x: True).points(2)


def test_with_annulus_keeps_seed():
    spec = SampleSpec(seed=11, count=4).with_annulus(1.0, 3.0)
    assert spec.describe() == {"seed": 11, "count": 4, "r_min": 1.0, "r_max": 3.0}


def test_spec_is_frozen_and_keyword_only():
    spec = SampleSpec(seed=2, count=3)
    with pytest.raises(ValidationError):
        spec.count = 10
    with pytest.raises(TypeError):
        SampleSpec(2, 3)
    assert spec.with_exclusion(avoid_coordinate_planes()).exclude is not None
    assert spec.exclude is None
