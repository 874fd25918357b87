import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kpdixmier.dixmier import (
    b_computation,
    casimir_scalar,
    coinvariant_quotient,
    dixmier_axioms,
    enveloping_image,
    gram_form,
    ideal_property_check,
    random_change_of_basis,
    trace_split,
    verify_quotient_dims,
)
from kpdixmier.weyl import WeylElement, commutator

from conftest import DESK, spec_id, weyl_of


def test_degree_zero_and_examples():
    gl2, sp2 = weyl_of(*DESK[0]), weyl_of(*DESK[3])
    assert coinvariant_quotient(gl2, 0).dim_B == 1
    row = coinvariant_quotient(gl2, 1, slack=0)
    assert (row.dim_gr, row.dim_B) == (3, 4)
    assert coinvariant_quotient(sp2, 2).dim_B == 9


@pytest.mark.parametrize("t,dmax", [(DESK[0], 3), (DESK[4], 2), (DESK[6], 2)], ids=lambda v: spec_id(v) if isinstance(v, tuple) else "")
def test_quotient_dims_small(t, dmax):
    rep = verify_quotient_dims(weyl_of(*t), dmax)
    assert rep.passed
    assert rep.rows[0].dim_gr == 1
    assert [r.dim_B for r in rep.rows] == [sum(rep.gr_dims()[:d + 1]) for d in range(dmax + 1)]


def test_slack_is_monotone():
    wm = weyl_of(*DESK[4])
    dims = [coinvariant_quotient(wm, 1, s).dim_B for s in range(3)]
    assert dims == sorted(dims, reverse=True) and len(set(dims)) == 1


def test_trace_examples():
    wm = weyl_of(*DESK[0])
    comp = b_computation(wm, 2)
    T = trace_split(comp, 2)
    assert T.codim == 1
    assert T(comp.unit()) == 1
    rep = comp.rep({comp.basis_of(1)[2]: Fraction(1)})
    for xg in wm.xi_g:
        assert T(comp.nf(commutator(xg, rep))) == 0


def test_gram_examples():
    wm = weyl_of(*DESK[0])
    g0 = gram_form(wm, 0)
    assert g0.matrix == [[1]] and g0.positive_definite
    g1 = gram_form(wm, 1)
    assert g1.size == 4 and g1.hermitian and g1.signature == (4, 0, 0)
    assert g1.invariance_failures == 0


def test_casimir_examples():
    sp2 = weyl_of(*DESK[3])
    c = casimir_scalar(sp2)
    assert c == Fraction(-3, 8)
    gl2 = weyl_of(*DESK[0])
    assert casimir_scalar(gl2) == casimir_scalar(gl2, random_change_of_basis(4, seed=7))


def test_enveloping_examples():
    gl2 = weyl_of(*DESK[0])
    rows = enveloping_image(gl2, 1)
    assert [r.image_rank for r in rows] == [1, 4]
    sp2 = weyl_of(*DESK[3])
    rows = enveloping_image(sp2, 2)
    assert rows[2].image_rank == 9 and rows[2].surjective


@pytest.mark.parametrize("t", [DESK[0], DESK[4], DESK[6]], ids=spec_id)
def test_axioms_and_ideal_property(t):
    wm = weyl_of(*t)
    rep = dixmier_axioms(wm, pairs=8, seed=2)
    assert rep["passed"], rep["failures"]
    assert ideal_property_check(wm, samples=6)["passed"]


def test_reflections_commute_with_theta_mod_M():
    wm = weyl_of(*DESK[4])
    comp = b_computation(wm, 2)
    rng = random.Random(0)
    refl = wm.model.s_reflections[0]
    for _ in range(5):
        e = rng.choice(comp.cols[rng.choice(list(comp.cols))])
        a = WeylElement.normal_monomial(wm.frame, e)
        assert not comp.nf(wm.theta(a - wm.act_group(refl.on_L, a)))


# --- property tests on B_1 (products land in B_2) ---------------------------------

_coef = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def _classes(comp):
    idx = comp.basis_of(1)
    return st.dictionaries(st.sampled_from(idx), _coef, min_size=1, max_size=3).map(
        lambda d: {k: v for k, v in d.items() if v})


_O3 = DESK[4]


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_trace_is_cyclic(data):
    wm = weyl_of(*_O3)
    comp = b_computation(wm, 2)
    T = trace_split(comp, 2)
    a = data.draw(_classes(comp))
    b = data.draw(_classes(comp))
    assert T(comp.mul(a, b)) == T(comp.mul(b, a))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_tau_is_antimultiplicative_involution(data):
    wm = weyl_of(*_O3)
    comp = b_computation(wm, 2)
    a = data.draw(_classes(comp))
    b = data.draw(_classes(comp))
    assert comp.tau(comp.mul(a, b)) == comp.mul(comp.tau(b), comp.tau(a))
    assert comp.tau(comp.tau(a)) == a


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_unit_is_neutral(data):
    wm = weyl_of(*DESK[0])
    comp = b_computation(wm, 2)
    a = data.draw(_classes(comp))
    assert comp.mul(comp.unit(), a) == a == comp.mul(a, comp.unit())
