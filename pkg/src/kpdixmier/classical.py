"""Classical Lie algebras gl, o and sp in explicit matrix form.

Forms are split (monomial Gram matrices): the diagonal matrices in the Lie
algebra then form a Cartan subalgebra, so matrix units and coordinate
functions are weight vectors.  Such Gram matrices are also orthogonal
matrices, which keeps the identity Hermitian form compatible with them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import SparseEchelon, identity, mat_inv, mat_mul, mat_transpose, zeros

ONE = Fraction(1)

KIND_NONE = "none"
KIND_ORTH = "orthogonal"
KIND_SYMP = "symplectic"


def split_gram(kind: str, d: int):
    """Standard split Gram matrix; None for the zero form."""
    if kind == KIND_NONE:
        return None
    q = zeros(d, d)
    if kind == KIND_ORTH:
        for i in range(d):
            q[i][d - 1 - i] = ONE
    elif kind == KIND_SYMP:
        if d % 2:
            raise ValueError("symplectic space must be even-dimensional")
        for i in range(d):
            q[i][d - 1 - i] = ONE if i < d // 2 else -ONE
    else:
        raise ValueError(kind)
    return q


def split_reflection(d: int):
    """An element of O(Q) with determinant -1 for the split orthogonal Q."""
    r = identity(d)
    if d % 2:
        m = d // 2
        r[m][m] = -ONE
    else:
        a, b = d // 2 - 1, d // 2
        r[a][a] = r[b][b] = Fraction(0)
        r[a][b] = r[b][a] = ONE
    return r


def bracket(x, y):
    xy = mat_mul(x, y)
    yx = mat_mul(y, x)
    return [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(xy, yx)]


def flatten(x) -> dict:
    n = len(x[0]) if x else 0
    return {i * n + j: v for i, row in enumerate(x) for j, v in enumerate(row) if v}


def in_algebra(x, q) -> bool:
    if q is None:
        return True
    lhs = mat_mul(mat_transpose(x), q)
    rhs = mat_mul(q, x)
    return all(a + b == 0 for r1, r2 in zip(lhs, rhs) for a, b in zip(r1, r2))


@dataclass(frozen=True)
class LieBasis:
    """A basis of gl(d), o(Q) or sp(Q) made of weight vectors.

    ``cartan`` lists the indices of the diagonal elements; ``weights[i]`` is
    the root of element ``i`` (zero for Cartan elements).
    """

    kind: str
    dim_space: int
    gram: tuple | None
    elements: tuple
    cartan: tuple[int, ...]
    weights: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.elements)

    def coords(self, x) -> list[Fraction]:
        return solve_in_basis(self.elements, x)

    def structure(self, i: int, j: int) -> list[Fraction]:
        return self.coords(bracket(self.elements[i], self.elements[j]))

    def index_weight(self, a: int) -> tuple[int, ...]:
        """Weight of the standard basis vector e_a of the underlying space."""
        return tuple(int(self.elements[c][a][a]) for c in self.cartan)


def lie_basis(kind: str, d: int, q=None) -> LieBasis:
    if kind != KIND_NONE and q is None:
        q = split_gram(kind, d)
    elements = general_lie_basis(kind, q, d)
    cartan = tuple(
        i for i, x in enumerate(elements)
        if all(x[a][b] == 0 for a in range(d) for b in range(d) if a != b)
    )
    weights = []
    for x in elements:
        w = []
        for c in cartan:
            h = elements[c]
            br = bracket(h, x)
            # x is a weight vector: [h, x] = α(h) x
            a = _ratio(br, x)
            if a is None:
                raise ValueError("basis element is not a weight vector")
            if a.denominator != 1:
                raise ValueError("non-integral weight")
            w.append(int(a))
        weights.append(tuple(w))
    return LieBasis(
        kind=kind,
        dim_space=d,
        gram=tuple(tuple(r) for r in q) if q is not None else None,
        elements=tuple(tuple(tuple(r) for r in x) for x in elements),
        cartan=cartan,
        weights=tuple(weights),
    )


def general_lie_basis(kind: str, q, d: int) -> list:
    """Basis of the Lie algebra of an arbitrary form (no weight structure)."""
    out = []
    ech = SparseEchelon()
    qinv = mat_inv(q) if q is not None else None
    for i in range(d):
        for j in range(d):
            x = zeros(d, d)
            x[i][j] = ONE
            if q is not None:
                e_ji = zeros(d, d)
                e_ji[j][i] = ONE
                corr = mat_mul(mat_mul(qinv, e_ji), q)
                x = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(x, corr)]
            f = flatten(x)
            if f and ech.add(f):
                out.append(x)
    return out


def _ratio(a, b):
    r = None
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if y == 0:
                if x != 0:
                    return None
                continue
            t = Fraction(x) / y
            if r is None:
                r = t
            elif r != t:
                return None
    return r if r is not None else Fraction(0)


def solve_in_basis(elements, x) -> list[Fraction]:
    """Coordinates of matrix x in the given basis; raises if x is outside the span."""
    from .linalg import sparse_kernel

    flat = [flatten(e) for e in elements]
    target = flatten(x)
    n = len(flat)
    rows: dict[int, dict] = {}
    for i, f in enumerate(flat):
        for k, v in f.items():
            rows.setdefault(k, {})[i] = v
    for k, v in target.items():
        rows.setdefault(k, {})[n] = -v
    ker = sparse_kernel(rows.values(), n + 1)
    for v in ker:
        if v.get(n):
            s = v[n]
            return [v.get(i, Fraction(0)) / s for i in range(n)]
    raise ValueError("matrix is not in the span of the basis")
