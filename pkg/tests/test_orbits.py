import pytest

from kpdixmier.classical import KIND_NONE, KIND_ORTH, KIND_SYMP
from kpdixmier.linalg import mat_mul, mat_transpose, rank
from kpdixmier.orbits import (
    InvalidPartition,
    ladder,
    list_orbits,
    nilpotent_representative,
    orbit_dimension,
    partitions,
    validate,
)

from conftest import DESK


def _ranks_of_powers(x, upto):
    n = len(x)
    p = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    out = []
    for _ in range(upto + 1):
        out.append(rank([{j: v for j, v in enumerate(r) if v} for r in p]))
        p = mat_mul(p, x)
    return out


def test_validate_examples():
    assert validate("GL", 2, [2]).components == 1
    assert validate("o", 4, [2, 2]).components == 2
    with pytest.raises(InvalidPartition):
        validate("Sp", 4, [3, 1])
    with pytest.raises(InvalidPartition):
        validate("Sp", 3, [3])
    with pytest.raises(InvalidPartition):
        validate("O", 3, [2, 1])
    with pytest.raises(InvalidPartition):
        validate("GL", 3, [2])


def test_parity_rules_by_enumeration():
    for n in range(1, 7):
        for p in partitions(n):
            validate("GL", n, p)
            mult = {k: p.count(k) for k in set(p)}
            o_ok = all(mult[k] % 2 == 0 for k in mult if k % 2 == 0)
            sp_ok = n % 2 == 0 and all(mult[k] % 2 == 0 for k in mult if k % 2 == 1)
            for g, ok in (("O", o_ok), ("Sp", sp_ok)):
                if ok:
                    validate(g, n, p)
                else:
                    with pytest.raises(InvalidPartition):
                        validate(g, n, p)


def test_list_orbits_sp4():
    rows = list_orbits("sp", 4)
    valid = [tuple(r["partition"]) for r in rows if r["valid"]]
    assert valid == [(4,), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_ladder_examples():
    lad = ladder(validate("GL", 2, [2]))
    assert (lad.r, lad.dims, lad.s_factors) == (1, (2, 1), ("GL",))
    lad = ladder(validate("O", 3, [3]))
    assert lad.dims == (3, 2, 1)
    assert lad.form_kinds == (KIND_ORTH, KIND_SYMP, KIND_ORTH)
    assert lad.s_factors == ("Sp", "O")
    lad = ladder(validate("Sp", 4, [2, 2]))
    assert (lad.r, lad.dims, lad.form_kinds) == (1, (4, 2), (KIND_SYMP, KIND_ORTH))


@pytest.mark.parametrize("g,n,p", DESK)
def test_ladder_invariants(g, n, p):
    lad = ladder(validate(g, n, p))
    assert lad.dims[0] == n
    assert all(a > b for a, b in zip(lad.dims, lad.dims[1:])) and lad.dims[-1] >= 1
    for d, k in zip(lad.dims, lad.form_kinds):
        assert k != KIND_SYMP or d % 2 == 0
        assert (k == KIND_NONE) == (g == "GL")


def test_representatives():
    x, q = nilpotent_representative(validate("GL", 2, [2]))
    assert q is None and _ranks_of_powers(x, 2) == [2, 1, 0]
    x, _ = nilpotent_representative(validate("GL", 3, [2, 1]))
    assert _ranks_of_powers(x, 1)[1] == 1
    x, q = nilpotent_representative(validate("O", 3, [3]))
    lhs, rhs = mat_mul(mat_transpose(x), q), mat_mul(q, x)
    assert all(a + b == 0 for r1, r2 in zip(lhs, rhs) for a, b in zip(r1, r2))
    assert _ranks_of_powers(x, 3) == [3, 2, 1, 0]


def test_orbit_dimension_examples():
    assert orbit_dimension(validate("GL", 2, [2])) == 2
    assert orbit_dimension(validate("GL", 3, [2, 1])) == 4
    assert orbit_dimension(validate("Sp", 4, [2, 2])) == 6


def test_gl_orbit_dimension_formula():
    # n^2 - Σ (dual partition parts)^2
    for n in range(1, 5):
        for p in partitions(n):
            dual = [sum(1 for x in p if x > i) for i in range(p[0])]
            assert orbit_dimension(validate("GL", n, p)) == n * n - sum(d * d for d in dual)
