"""Exact linear algebra over Q and Q(i).

Everything works on sparse rows (``dict`` column -> scalar).  Pivot rows are
kept normalized to a leading 1, so entries are Fractions / Gaussian
rationals and no rounding ever happens.
"""

from __future__ import annotations

import heapq
from math import gcd
from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import as_scalar, conj, real

__all__ = [
    "ExactMatrix",
    "NotHermitian",
    "SparseEchelon",
    "echelon",
    "rank",
    "kernel_basis",
    "intersect_subspaces",
    "in_span",
    "hermitian_signature",
    "sparse_kernel",
    "mat_mul",
    "mat_inv",
    "mat_transpose",
    "identity",
    "zeros",
    "mat_eq",
]

ONE = Fraction(1)
ZERO = Fraction(0)


class NotHermitian(ValueError):
    pass


class ExactMatrix:
    """Immutable exact matrix stored as sparse rows."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        self._rows = tuple({c: v for c, v in r.items() if v} for r in rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        sparse = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            sparse.append({j: as_scalar(v) for j, v in enumerate(r) if v})
        return cls(len(rows), ncols, sparse)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, [{i: ONE} for i in range(n)])

    def row(self, i: int) -> dict:
        return dict(self._rows[i])

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i].get(j, ZERO)

    def to_rows(self) -> list[list]:
        return [[r.get(j, ZERO) for j in range(self.ncols)] for r in self._rows]

    def sparse_rows(self) -> list[dict]:
        return [dict(r) for r in self._rows]

    def density(self) -> float:
        if not self.nrows or not self.ncols:
            return 0.0
        return sum(len(r) for r in self._rows) / (self.nrows * self.ncols)

    def transpose(self) -> "ExactMatrix":
        out = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[j][i] = v
        return ExactMatrix(self.ncols, self.nrows, out)

    def conj_transpose(self) -> "ExactMatrix":
        out = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[j][i] = conj(v)
        return ExactMatrix(self.ncols, self.nrows, out)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = []
        for r in self._rows:
            acc: dict = {}
            for k, a in r.items():
                for j, b in other._rows[k].items():
                    acc[j] = acc.get(j, ZERO) + a * b
            out.append(acc)
        return ExactMatrix(self.nrows, other.ncols, out)

    def apply(self, vec: Sequence) -> list:
        return [sum((v * vec[j] for j, v in r.items()), ZERO) for r in self._rows]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self._rows == other._rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return f"ExactMatrix({self.to_rows()!r})"


def _axpy(target: dict, coef, row: dict) -> None:
    """target -= coef * row, in place, dropping exact zeros."""
    for k, val in row.items():
        nv = target.get(k, ZERO) - coef * val
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class SparseEchelon:
    """Incremental row echelon form.

    Each stored row has a distinct pivot equal to its smallest column, with
    coefficient 1 there.  ``reduce`` performs full reduction, so the
    remainder has no pivot columns at all.
    """

    def __init__(self):
        self.rows: dict[int, dict] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = {k: x for k, x in vec.items() if x}
        rows = self.rows
        heap = [k for k in v if k in rows]
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            coef = v.get(c)
            if coef is None:
                continue
            row = rows[c]
            for k, val in row.items():
                nv = v.get(k, ZERO) - coef * val
                if nv:
                    if k not in v and k in rows:
                        heapq.heappush(heap, k)
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def _lead_reduce(self, vec: dict) -> dict:
        v = {k: x for k, x in vec.items() if x}
        rows = self.rows
        while v:
            c = min(v)
            row = rows.get(c)
            if row is None:
                break
            _axpy(v, v[c], row)
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; return True when it enlarged the span."""
        v = self._lead_reduce(vec)
        if not v:
            return False
        c = min(v)
        lead = v[c]
        if lead != 1:
            inv = 1 / lead
            v = {k: x * inv for k, x in v.items()}
        self.rows[c] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def rref_rows(self) -> dict[int, dict]:
        """Fully reduced copies of the rows (no row touches another's pivot)."""
        done = SparseEchelon()
        for c in sorted(self.rows, reverse=True):
            r = done.reduce(self.rows[c])
            done.rows[c] = r
        return done.rows


class IntegerEchelon:
    """Fraction-free echelon form for integer rows (rank only).

    Rows are kept primitive (content 1), so entries stay small; this is the
    fast path for evaluation matrices with integer entries.
    """

    def __init__(self):
        self.rows: dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, vec: dict) -> bool:
        v = {k: int(x) for k, x in vec.items() if x}
        rows = self.rows
        while v:
            c = min(v)
            row = rows.get(c)
            if row is None:
                g = 0
                for x in v.values():
                    g = gcd(g, x)
                if v[c] < 0:
                    g = -g
                rows[c] = {k: x // g for k, x in v.items()}
                return True
            a, b = row[c], v[c]
            g = gcd(a, b)
            a, b = a // g, b // g
            nv = {k: a * x for k, x in v.items()}
            for k, x in row.items():
                y = nv.get(k, 0) - b * x
                if y:
                    nv[k] = y
                else:
                    nv.pop(k, None)
            g = 0
            for x in nv.values():
                g = gcd(g, x)
            v = {k: x // g for k, x in nv.items()} if g > 1 else nv
        return False


def sparse_kernel(rows: Iterable[dict], ncols: int) -> list[dict]:
    """Basis of {v : r.v = 0 for every row r} as sparse vectors."""
    ech = SparseEchelon()
    for r in rows:
        ech.add(r)
    red = ech.rref_rows()
    free = [j for j in range(ncols) if j not in red]
    basis = []
    for f in free:
        v = {f: ONE}
        for p, r in red.items():
            x = r.get(f)
            if x:
                v[p] = -x
        basis.append(v)
    return basis


def echelon(m: ExactMatrix) -> tuple[ExactMatrix, int]:
    """Reduced row echelon form and rank."""
    ech = SparseEchelon()
    for r in m.sparse_rows():
        ech.add(r)
    red = ech.rref_rows()
    rows = [red[c] for c in sorted(red)]
    rows += [{} for _ in range(m.nrows - len(rows))]
    return ExactMatrix(m.nrows, m.ncols, rows), len(red)


def rank(m: ExactMatrix | Sequence[dict]) -> int:
    ech = SparseEchelon()
    src = m.sparse_rows() if isinstance(m, ExactMatrix) else m
    for r in src:
        ech.add(r)
    return ech.rank


def kernel_basis(m: ExactMatrix) -> list[list]:
    """Column vectors spanning ker(m); exactly ``cols - rank`` of them."""
    out = []
    for v in sparse_kernel(m.sparse_rows(), m.ncols):
        out.append([v.get(j, ZERO) for j in range(m.ncols)])
    return out


def _as_sparse(vec) -> dict:
    if isinstance(vec, dict):
        return {k: v for k, v in vec.items() if v}
    return {j: as_scalar(x) for j, x in enumerate(vec) if x}


def intersect_subspaces(a: Sequence, b: Sequence) -> list:
    """Basis of span(a) ∩ span(b), from the kernel of the stacked system.

    Vectors may be dense sequences or sparse dicts; the output matches the
    input flavour of ``a`` (dense lists when ``a`` holds sequences).
    """
    a_sp = [_as_sparse(v) for v in a]
    b_sp = [_as_sparse(v) for v in b]
    # reduce to independent sets first
    a_sp = _independent(a_sp)
    b_sp = _independent(b_sp)
    if not a_sp or not b_sp:
        return []
    na = len(a_sp)
    # columns of the stacked system [A | -B]; rows indexed by ambient coordinate
    coord_rows: dict[int, dict] = {}
    for i, v in enumerate(a_sp):
        for k, x in v.items():
            coord_rows.setdefault(k, {})[i] = x
    for i, v in enumerate(b_sp):
        for k, x in v.items():
            coord_rows.setdefault(k, {})[na + i] = -x
    ker = sparse_kernel(coord_rows.values(), na + len(b_sp))
    out = SparseEchelon()
    for kv in ker:
        w: dict = {}
        for i, c in kv.items():
            if i < na:
                for k, x in a_sp[i].items():
                    w[k] = w.get(k, ZERO) + c * x
        out.add({k: x for k, x in w.items() if x})
    red = out.rref_rows()
    vecs = [red[c] for c in sorted(red)]
    if a and not isinstance(a[0], dict):
        dim = len(a[0])
        return [[v.get(j, ZERO) for j in range(dim)] for v in vecs]
    return vecs


def _independent(vecs: list[dict]) -> list[dict]:
    ech = SparseEchelon()
    out = []
    for v in vecs:
        if ech.add(v):
            out.append(v)
    return out


def in_span(vec, basis: Sequence) -> bool:
    ech = SparseEchelon()
    for b in basis:
        ech.add(_as_sparse(b))
    return ech.contains(_as_sparse(vec))


def hermitian_signature(g: ExactMatrix) -> tuple[int, int, int]:
    """Inertia (n_pos, n_neg, n_zero) by symmetric pivoting over Q(i)."""
    n = g.nrows
    if g.ncols != n or g != g.conj_transpose():
        raise NotHermitian("matrix is not equal to its conjugate transpose")
    h = g.to_rows()
    idx = list(range(n))
    pos = neg = 0
    while idx:
        piv = next((i for i in idx if h[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if i != j and h[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            c = conj(h[i][j])
            # basis change e_i <- e_i + c e_j makes the (i,i) entry 2|h_ij|^2 > 0
            for k in idx:
                h[i][k] = h[i][k] + conj(c) * h[j][k]
            for k in idx:
                h[k][i] = h[k][i] + c * h[k][j]
            piv = i
        d = real(h[piv][piv])
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for a in idx:
            f = h[a][piv] / d
            if f:
                for b in idx:
                    h[a][b] = h[a][b] - f * h[piv][b]
    return pos, neg, n - pos - neg


# --- small dense helpers (lists of lists) ---------------------------------

def zeros(r: int, c: int) -> list[list]:
    return [[ZERO] * c for _ in range(r)]


def identity(n: int) -> list[list]:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def mat_mul(a, b) -> list[list]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        oi = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def mat_transpose(a) -> list[list]:
    return [list(r) for r in zip(*a)] if a else []


def mat_inv(a) -> list[list]:
    n = len(a)
    m = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def mat_eq(a, b) -> bool:
    return len(a) == len(b) and all(list(x) == list(y) for x, y in zip(a, b))
