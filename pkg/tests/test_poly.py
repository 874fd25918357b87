from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kpdixmier.poly import (
    DegreeMismatch,
    OmegaData,
    RegistryMismatch,
    SparsePoly,
    VariableRegistry,
    coords_of,
    from_coords,
    monomial_basis,
    natural_degree,
    poisson_bracket,
)

REG = VariableRegistry(("q1", "q2", "p1", "p2"))
# Ω(e_q, e_p) = 1 on each pair
OMEGA = OmegaData(REG, [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])


def polys(reg=REG, max_deg=3):
    mono = st.tuples(*[st.integers(0, max_deg)] * len(reg)).filter(lambda e: sum(e) <= max_deg)
    coef = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))
    return st.dictionaries(mono, coef, max_size=4).map(lambda t: SparsePoly(reg, t))


def test_registry_names_unique():
    with pytest.raises(ValueError):
        VariableRegistry(("x", "x"))


def test_no_zero_coefficients_stored():
    x = REG.var("q1")
    assert (x - x).terms == {}
    assert SparsePoly(REG, {(1, 0, 0, 0): 0}).terms == {}


def test_degrees():
    q1, p1 = REG.var("q1"), REG.var("p1")
    assert natural_degree(Fraction(3, 2)) == 3
    assert (q1 * q1 * p1).degree() == 3
    assert REG.zero().degree() == -1
    with pytest.raises(ValueError):
        natural_degree(Fraction(1, 3))


def test_monomial_basis_counts():
    assert len(monomial_basis(REG, 0)) == 1
    assert len(monomial_basis(REG, 1)) == 10
    assert len(monomial_basis(VariableRegistry(("x", "y")), Fraction(3, 2))) == 4


def test_coords_round_trip():
    basis = monomial_basis(REG, 1)
    assert coords_of(basis[0], basis)[0] == 1
    assert coords_of(REG.zero(), basis) == [0] * 10
    f = basis[1].scale(2) + basis[5].scale(3)
    v = coords_of(f, basis)
    assert (v[1], v[5]) == (2, 3) and sum(1 for x in v if x) == 2
    assert from_coords(v, basis) == f
    with pytest.raises(DegreeMismatch):
        coords_of(REG.var(0), basis)


def test_bracket_basics():
    q1, p1 = REG.var("q1"), REG.var("p1")
    assert poisson_bracket(q1, q1, OMEGA).is_zero()
    assert poisson_bracket(REG.one().scale(5), p1, OMEGA).is_zero()
    # {z_k, z_l} = (Ω^{-1})_kl; for this Ω that is -1 on (q, p)
    assert poisson_bracket(q1, p1, OMEGA) == REG.one().scale(-1)


def test_registry_mismatch():
    other = VariableRegistry(("x",))
    with pytest.raises(RegistryMismatch):
        poisson_bracket(other.var(0), REG.var(0), OMEGA)


def test_omega_must_be_antisymmetric():
    with pytest.raises(ValueError):
        OmegaData(VariableRegistry(("x", "y")), [[0, 1], [1, 0]])


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_bracket_is_a_poisson_structure(f, g, h):
    b = lambda a, c: poisson_bracket(a, c, OMEGA)
    assert b(f, g) == -b(g, f)
    assert b(f, g * h) == b(f, g) * h + g * b(f, h)
    assert (b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_ring_axioms(f, g):
    assert f * g == g * f
    assert (f + g) - g == f
    if not f.is_zero() and not g.is_zero():
        assert (f * g).degree() == f.degree() + g.degree()


def test_substitution_and_evaluation():
    q1, q2 = REG.var("q1"), REG.var("q2")
    f = q1 * q1 + q2
    swap = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    assert f.substitute_linear(swap) == q2 * q2 + q1
    assert f.evaluate([2, 3, 0, 0]) == 7
