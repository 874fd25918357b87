import pytest

from kpdixmier.oracle import SamplePlan, check_point, oracle_details, orbit_coordinate_dim, \
    sample_orbit_points
from kpdixmier.orbits import validate

from conftest import DESK, spec_id


@pytest.mark.parametrize("t", DESK, ids=spec_id)
def test_points_lie_on_orbit(t):
    spec = validate(*t)
    for pt in sample_orbit_points(SamplePlan(spec, seed=3), 6):
        assert check_point(spec, pt)


def test_seed_determinism():
    spec = validate("O", 4, [2, 2])
    a = sample_orbit_points(SamplePlan(spec, seed=5), 5)
    b = sample_orbit_points(SamplePlan(spec, seed=5), 5)
    c = sample_orbit_points(SamplePlan(spec, seed=6), 5)
    assert a == b and a != c


def test_gl2_examples():
    plan = SamplePlan(validate("GL", 2, [2]))
    assert [orbit_coordinate_dim(plan, p) for p in range(3)] == [1, 3, 5]


def test_rank_monotone_and_seed_independent():
    spec = validate("Sp", 4, [2, 2])
    d = oracle_details(SamplePlan(spec, seed=1), 2)
    assert d["ranks"] == sorted(d["ranks"]) and d["ranks"][-1] == d["ranks"][-2]
    assert orbit_coordinate_dim(SamplePlan(spec, seed=9), 2) == d["rank"]


def test_undersampling_rejected():
    with pytest.raises(ValueError):
        orbit_coordinate_dim(SamplePlan(validate("GL", 2, [2]), count=3), 2)
