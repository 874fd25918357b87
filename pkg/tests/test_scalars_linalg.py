from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kpdixmier.linalg import (
    ExactMatrix,
    IntegerEchelon,
    NotHermitian,
    SparseEchelon,
    echelon,
    hermitian_signature,
    in_span,
    intersect_subspaces,
    kernel_basis,
    mat_inv,
    mat_mul,
    rank,
    sparse_kernel,
)
from kpdixmier.scalars import I, QI, conj, fmt_scalar, parse_scalar

F = Fraction
small = st.integers(-5, 5)
fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
gauss = st.builds(lambda a, b: a + I * b, fracs, fracs)


def test_qi_collapses_to_fraction():
    z = (1 + I) * (1 - I)
    assert z == 2 and isinstance(z, Fraction)
    assert I * I == -1


def test_fraction_lowest_terms():
    x = Fraction(6, -4)
    assert (x.numerator, x.denominator) == (-3, 2)


@given(gauss, gauss)
def test_conjugation_is_involutive_and_multiplicative(a, b):
    assert conj(conj(a)) == a
    assert conj(a * b) == conj(a) * conj(b)


@given(gauss)
def test_format_round_trip(a):
    assert parse_scalar(fmt_scalar(a)) == a


def test_format_examples():
    assert fmt_scalar(Fraction(3, 4)) == "3/4"
    assert fmt_scalar(Fraction(1, 2) + I * Fraction(1, 3)) == "1/2+1/3i"
    assert fmt_scalar(-I) == "-i"


def test_echelon_examples():
    e, r = echelon(ExactMatrix.identity(2))
    assert r == 2 and e == ExactMatrix.identity(2)
    z = ExactMatrix.from_rows([[0] * 4 for _ in range(3)])
    assert echelon(z)[1] == 0
    e, r = echelon(ExactMatrix.from_rows([[1, 2], [2, 4]]))
    assert r == 1
    assert e.to_rows() == [[1, 2], [0, 0]]


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.identity(3)) == []
    (v,) = kernel_basis(ExactMatrix.from_rows([[1, -1]]))
    assert v[0] == v[1] != 0
    (v,) = kernel_basis(ExactMatrix.from_rows([[1, 2], [2, 4]]))
    assert v[0] == -2 * v[1] != 0


def test_intersection_examples():
    e1, e2, e3 = [1, 0, 0], [0, 1, 0], [0, 0, 1]
    assert len(intersect_subspaces([e1], [e1])) == 1
    assert intersect_subspaces([e1], [e2]) == []
    (v,) = intersect_subspaces([e1, e2], [[1, 1, 0], e3])
    assert in_span(v, [[1, 1, 0]])


def test_signature_examples():
    assert hermitian_signature(ExactMatrix.identity(3)) == (3, 0, 0)
    assert hermitian_signature(ExactMatrix.from_rows([[1, 0, 0], [0, -1, 0], [0, 0, 0]])) == (1, 1, 1)
    assert hermitian_signature(ExactMatrix.from_rows([[2, I], [-I, 2]])) == (2, 0, 0)
    assert hermitian_signature(ExactMatrix.from_rows([[0, 1], [1, 0]])) == (1, 1, 0)
    with pytest.raises(NotHermitian):
        hermitian_signature(ExactMatrix.from_rows([[1, 2], [3, 1]]))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-1, 1), min_size=4, max_size=4),
       st.lists(st.lists(small, min_size=4, max_size=4), min_size=4, max_size=4))
def test_signature_matches_congruent_diagonal(diag, p):
    # P D P^* has the inertia of D whenever P is invertible (Sylvester)
    try:
        mat_inv(p)
    except (ZeroDivisionError, ValueError):
        return
    d = [[Fraction(diag[i]) if i == j else Fraction(0) for j in range(4)] for i in range(4)]
    pc = [[p[j][i] + I * 0 for j in range(4)] for i in range(4)]
    g = mat_mul(mat_mul(p, d), pc)
    want = (diag.count(1), diag.count(-1), diag.count(0))
    assert hermitian_signature(ExactMatrix.from_rows(g)) == want


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=6))
def test_rank_nullity_and_idempotence(rows):
    m = ExactMatrix.from_rows(rows)
    e, r = echelon(m)
    assert r + len(kernel_basis(m)) == 5
    assert echelon(e)[1] == r
    assert echelon(e)[0] == e
    for v in kernel_basis(m):
        assert all(x == 0 for x in m.apply(v))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=6, max_size=6), min_size=1, max_size=8))
def test_integer_echelon_rank_agrees(rows):
    ie = IntegerEchelon()
    for r in rows:
        ie.add({j: x for j, x in enumerate(r) if x})
    assert ie.rank == rank([{j: Fraction(x) for j, x in enumerate(r) if x} for r in rows])


def test_sparse_kernel_and_reduce():
    rows = [{0: F(1), 2: F(-1)}, {1: F(1), 2: F(-1)}]
    (v,) = sparse_kernel(rows, 3)
    assert v == {2: 1, 0: 1, 1: 1}
    ech = SparseEchelon()
    for r in rows:
        ech.add(r)
    assert ech.contains({0: F(2), 1: F(-2)})
    assert not ech.contains({2: F(1)})
