"""Nilpotent orbits of GL(n), O(n), Sp(n) labelled by partitions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .classical import KIND_NONE, KIND_ORTH, KIND_SYMP, bracket, flatten, general_lie_basis, in_algebra
from .linalg import SparseEchelon, identity, mat_mul, mat_transpose, rank, zeros

GROUPS = ("GL", "O", "Sp")
_GROUP_ALIASES = {"gl": "GL", "o": "O", "sp": "Sp"}

ONE = Fraction(1)


class InvalidPartition(ValueError):
    pass


class ConstructionFailure(RuntimeError):
    pass


def normalize_group(g: str) -> str:
    key = g.strip()
    if key in GROUPS:
        return key
    try:
        return _GROUP_ALIASES[key.lower()]
    except KeyError:
        raise InvalidPartition(f"unknown group kind {g!r}") from None


@dataclass(frozen=True)
class OrbitSpec:
    group: str
    n: int
    partition: tuple[int, ...]
    components: int = 1

    @property
    def very_even(self) -> bool:
        return self.components == 2

    @property
    def label(self) -> str:
        return f"{self.group}({self.n})[{','.join(map(str, self.partition))}]"

    def to_json(self) -> dict:
        return {"group": self.group, "n": self.n, "partition": list(self.partition),
                "label": self.label, "components": self.components}


def validate(group: str, n: int, partition) -> OrbitSpec:
    group = normalize_group(group)
    parts = tuple(int(p) for p in partition)
    if not parts or any(p <= 0 for p in parts):
        raise InvalidPartition("partition entries must be positive")
    if list(parts) != sorted(parts, reverse=True):
        raise InvalidPartition("partition must be weakly decreasing")
    if sum(parts) != n:
        raise InvalidPartition(f"partition {list(parts)} does not sum to n={n}")
    mult = Counter(parts)
    if group == "O":
        bad = [p for p, m in mult.items() if p % 2 == 0 and m % 2]
        if bad:
            raise InvalidPartition(f"even parts {sorted(bad)} need even multiplicity for O")
    elif group == "Sp":
        if n % 2:
            raise InvalidPartition("Sp needs even n")
        bad = [p for p, m in mult.items() if p % 2 == 1 and m % 2]
        if bad:
            raise InvalidPartition(f"odd parts {sorted(bad)} need even multiplicity for Sp")
    components = 1
    if group == "O" and all(p % 2 == 0 and m % 2 == 0 for p, m in mult.items()):
        components = 2
    return OrbitSpec(group, n, parts, components)


def partitions(n: int, largest: int | None = None):
    """Partitions of n in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def list_orbits(group: str, n: int) -> list[dict]:
    group = normalize_group(group)
    rows = []
    for p in partitions(n):
        try:
            spec = validate(group, n, p)
            rows.append({"partition": list(p), "valid": True, "components": spec.components})
        except InvalidPartition as exc:
            rows.append({"partition": list(p), "valid": False, "components": 0, "reason": str(exc)})
    return rows


@dataclass(frozen=True)
class LadderData:
    r: int
    dims: tuple[int, ...]
    form_kinds: tuple[str, ...]
    s_factors: tuple[str, ...]  # group kind of S_1..S_r

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "dims": list(self.dims),
            "form_kinds": list(self.form_kinds),
            "s_factors": [f"{k}({d})" for k, d in zip(self.s_factors, self.dims[1:])],
        }


_S_OF_FORM = {KIND_NONE: "GL", KIND_ORTH: "O", KIND_SYMP: "Sp"}


def ladder(spec: OrbitSpec) -> LadderData:
    r = spec.partition[0] - 1
    dims = tuple(sum(max(p - e, 0) for p in spec.partition) for e in range(r + 1))
    first = {"GL": KIND_NONE, "O": KIND_ORTH, "Sp": KIND_SYMP}[spec.group]
    kinds = [first]
    for _ in range(r):
        prev = kinds[-1]
        kinds.append(KIND_NONE if prev == KIND_NONE else (KIND_SYMP if prev == KIND_ORTH else KIND_ORTH))
    for d, k in zip(dims, kinds):
        if k == KIND_SYMP and d % 2:
            raise ConstructionFailure("odd-dimensional symplectic level")
    return LadderData(r, dims, tuple(kinds), tuple(_S_OF_FORM[k] for k in kinds[1:]))


def _shift(k: int):
    """Lower shift: e_i -> e_{i+1}, a single nilpotent Jordan block."""
    x = zeros(k, k)
    for i in range(k - 1):
        x[i + 1][i] = ONE
    return x


def _block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


def nilpotent_representative(spec: OrbitSpec):
    """Nilpotent x0 of Jordan type ``spec.partition`` and the ambient Gram Q.

    Returns ``(x0, Q)`` with ``Q = None`` for GL.  For O/Sp, x0^T Q + Q x0 = 0.
    """
    xs, qs = [], []
    if spec.group == "GL":
        xs = [_shift(p) for p in spec.partition]
    else:
        sym = spec.group == "O"
        mult = Counter(spec.partition)
        for p in sorted(mult, reverse=True):
            m = mult[p]
            single = (p % 2 == 1) if sym else (p % 2 == 0)
            if single:
                for _ in range(m):
                    xs.append(_shift(p))
                    q = zeros(p, p)
                    for i in range(p):
                        q[i][p - 1 - i] = ONE if i % 2 == 0 else -ONE
                    qs.append(q)
            else:
                for _ in range(m // 2):
                    n_ = _shift(p)
                    xs.append(_block_diag([n_, [[-v for v in r] for r in mat_transpose(n_)]]))
                    eps = ONE if sym else -ONE
                    q = zeros(2 * p, 2 * p)
                    for i in range(p):
                        q[i][p + i] = ONE
                        q[p + i][i] = eps
                    qs.append(q)
    x0 = _block_diag(xs)
    q0 = _block_diag(qs) if qs else None
    lad = ladder(spec)
    power = identity(spec.n)
    for d in range(lad.r + 2):
        expected = lad.dims[d] if d <= lad.r else 0
        if rank([flatten_row(r) for r in power]) != expected:
            raise ConstructionFailure(f"rank of x0^{d} is not {expected}")
        power = mat_mul(power, x0)
    if q0 is not None and not in_algebra(x0, q0):
        raise ConstructionFailure("x0 does not preserve the form")
    return x0, q0


def flatten_row(row) -> dict:
    return {j: v for j, v in enumerate(row) if v}


def lie_algebra_of(spec: OrbitSpec, q) -> list:
    kind = {"GL": KIND_NONE, "O": KIND_ORTH, "Sp": KIND_SYMP}[spec.group]
    return general_lie_basis(kind, q, spec.n)


def orbit_dimension(spec: OrbitSpec) -> int:
    """dim g - dim of the centralizer of x0 in g."""
    x0, q = nilpotent_representative(spec)
    basis = lie_algebra_of(spec, q)
    images = [flatten(bracket(y, x0)) for y in basis]
    ech = SparseEchelon()
    for v in images:
        ech.add(v)
    return ech.rank
