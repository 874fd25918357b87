import pytest

from kpdixmier.reduction import (
    ci_series,
    complete_intersection_check,
    gamma_image_check,
    ideal_degree,
    invariant_basis,
    invariant_ideal,
    koszul_homology_window,
    poisson_closure_check,
    reduced_hilbert,
)

from conftest import DESK, model_of, spec_id


def test_invariant_examples(gl2, sp2):
    assert invariant_basis(gl2, 0).dim == 1
    assert invariant_basis(gl2, 1).dim == 4
    assert invariant_basis(sp2, 1).dim == 3


def test_sp2_invariants_are_even_polynomials(sp2):
    # O(1) = {±1}: invariants are the even polynomials, none in odd natural degree
    assert invariant_basis(sp2, "3/2").dim == 0
    assert [invariant_basis(sp2, j).dim for j in range(4)] == [1, 3, 5, 7]


def test_ideal_examples(gl2, sp2):
    assert ideal_degree(gl2, 1).dim == 1
    assert invariant_ideal(gl2, 1).dim == 1
    assert all(ideal_degree(sp2, j).dim == 0 for j in range(1, 4))
    m = model_of("GL", 3, (2, 1))
    assert invariant_basis(m, 1).dim == 9
    assert invariant_ideal(m, 1).dim == 1


@pytest.mark.parametrize("t,dims", [
    (DESK[0], [1, 3, 5, 7]),     # (1+t)/(1-t)^2
    (DESK[3], [1, 3, 5, 7]),     # even polynomials in two variables
    (DESK[4], [1, 3, 5]),        # so(3) = sl(2) nilpotent cone
    (DESK[1], [1, 8, 27, 64]),   # minimal orbit of sl(3): (p+1)^3
    (DESK[2], [1, 8, 35]),       # (1-t^2)(1-t^3)/(1-t)^8
    (DESK[6], [1, 6, 10]),       # two sl(2) cones meeting at 0
], ids=lambda v: spec_id(v) if isinstance(v, tuple) else "")
def test_reduced_hilbert(t, dims):
    table = reduced_hilbert(model_of(*t), len(dims) - 1)
    assert table.quotient_dims() == dims
    for r in table.rows:
        assert r.dim_Iinv <= r.dim_I and r.quotient == r.dim_Pinv - r.dim_Iinv >= 0


def test_ci_series():
    assert ci_series(1, 4, 3) == [1, 4, 9, 16]
    assert ci_series(0, 2, 3) == [1, 2, 3, 4]
    assert ci_series(3, 8, 2) == [1, 8, 33]


@pytest.mark.parametrize("t", DESK, ids=spec_id)
def test_complete_intersection_window(t):
    m = model_of(*t)
    dmax = 3 if m.dim_L <= 8 else 2
    rep = complete_intersection_check(m, dmax)
    assert rep["passed"], rep["rows"]


def test_koszul_examples(sp2, gl2, o3):
    rows = koszul_homology_window(sp2, 3, 0)
    assert [r["H"][0] for r in rows] == [1, 2, 3, 4, 5, 6, 7]
    for m, tmax in ((gl2, 1), (o3, 2)):
        for r in koszul_homology_window(m, 2, tmax):
            assert all(r["H"][t] == 0 for t in range(1, tmax + 1))
            assert r["H"][0] == r["dim_P_over_I"]
    with pytest.raises(ValueError):
        koszul_homology_window(gl2, 1, 2)


@pytest.mark.parametrize("t", [DESK[0], DESK[1], DESK[4], DESK[6]], ids=spec_id)
def test_gamma_image_is_surjective(t):
    m = model_of(*t)
    for p in range(3):
        rep = gamma_image_check(m, p)
        assert rep["passed"], rep


@pytest.mark.parametrize("t", [DESK[0], DESK[4]], ids=spec_id)
def test_invariant_ideal_is_poisson(t):
    m = model_of(*t)
    for j in (1, 2):
        assert poisson_closure_check(m, j)["passed"]
