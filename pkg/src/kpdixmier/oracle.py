"""Sampling oracle for dim C[Ō]_p.

Random rational points g x0 g^{-1} of the orbit are generated exactly, and
the rank of the matrix (degree-p monomials in coordinates of g) × (points)
is computed.  The rank only ever under-counts, so it is increased until it
is stable under doubling the number of points.  Nothing here uses the
ladder model.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm

from .linalg import ExactMatrix, IntegerEchelon, SparseEchelon, identity, mat_inv, mat_mul, mat_transpose, rank
from .orbits import OrbitSpec, ladder, lie_algebra_of, nilpotent_representative
from .poly import monomials_of_degree

ONE = Fraction(1)


class RankUnstable(RuntimeError):
    pass


class SingularCayley(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplePlan:
    spec: OrbitSpec
    count: int | None = None  # base number of points; None means dim S(g)[p] + 4
    seed: int = 0
    height: int = 3
    retries: int = 20

    def to_json(self):
        return {"spec": self.spec.to_json(), "count": self.count, "seed": self.seed,
                "height": self.height}


def _coordinates(spec: OrbitSpec, q):
    """Matrix entries (i, j) that form a basis of linear functions on g."""
    n = spec.n
    if q is None:
        return [(i, j) for i in range(n) for j in range(n)]
    basis = lie_algebra_of(spec, q)
    ech = SparseEchelon()
    chosen = []
    for i in range(n):
        for j in range(n):
            if ech.add({k: b[i][j] for k, b in enumerate(basis) if b[i][j]}):
                chosen.append((i, j))
    return chosen


def _rand_int(rng, h):
    return Fraction(rng.randint(-h, h))


def _random_group_element(spec, q, basis, rng, plan, reflect: bool):
    n = spec.n
    if q is None:
        for _ in range(plan.retries):
            g = [[_rand_int(rng, plan.height) for _ in range(n)] for _ in range(n)]
            try:
                return g, mat_inv(g)
            except (ZeroDivisionError, ValueError):
                continue
        raise SingularCayley("no invertible matrix found")
    for _ in range(plan.retries):
        y = [[Fraction(0)] * n for _ in range(n)]
        for b in basis:
            c = _rand_int(rng, plan.height)
            for i in range(n):
                for j in range(n):
                    if b[i][j]:
                        y[i][j] += c * b[i][j]
        eye = identity(n)
        try:
            inv = mat_inv([[eye[i][j] + y[i][j] for j in range(n)] for i in range(n)])
        except (ZeroDivisionError, ValueError):
            continue
        g = mat_mul([[eye[i][j] - y[i][j] for j in range(n)] for i in range(n)], inv)
        if reflect:
            g = mat_mul(_reflection(q, rng, plan), g)
        return g, mat_inv(g)
    raise SingularCayley("Cayley transform stayed singular")


def _reflection(q, rng, plan):
    """I - 2 v v^T Q / (v^T Q v) for a random non-isotropic v."""
    n = len(q)
    while True:
        v = [Fraction(rng.randint(-plan.height, plan.height)) for _ in range(n)]
        qv = [sum(q[i][j] * v[j] for j in range(n)) for i in range(n)]
        norm = sum(v[i] * qv[i] for i in range(n))
        if norm:
            break
    return [[(ONE if i == j else 0) - 2 * v[i] * qv[j] / norm for j in range(n)] for i in range(n)]


def _integral(m):
    den = 1
    for row in m:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return [[int(x * den) for x in row] for row in m]


def _point_stream(plan: SamplePlan):
    spec = plan.spec
    x0, q = nilpotent_representative(spec)
    basis = lie_algebra_of(spec, q) if q is not None else None
    rng = random.Random(plan.seed)
    k = 0
    while True:
        # O-type: alternate components; this covers both components in the very even case
        reflect = spec.group == "O" and k % 2 == 1
        g, ginv = _random_group_element(spec, q, basis, rng, plan, reflect)
        yield _integral(mat_mul(mat_mul(g, x0), ginv))
        k += 1


def sample_orbit_points(plan: SamplePlan, count: int | None = None) -> list[ExactMatrix]:
    count = count if count is not None else (plan.count or 8)
    stream = _point_stream(plan)
    return [ExactMatrix.from_rows(next(stream)) for _ in range(count)]


def check_point(spec: OrbitSpec, point: ExactMatrix) -> bool:
    """Same Jordan type as x0 (ranks of powers) and, for O/Sp, preserves the form."""
    lad = ladder(spec)
    rows = point.to_rows()
    power = identity(spec.n)
    for d in range(lad.r + 2):
        expected = lad.dims[d] if d <= lad.r else 0
        if rank([{j: v for j, v in enumerate(r) if v} for r in power]) != expected:
            return False
        power = mat_mul(power, rows)
    _, q = nilpotent_representative(spec)
    if q is not None:
        lhs = mat_mul(mat_transpose(rows), q)
        rhs = mat_mul(q, rows)
        if any(a + b for r1, r2 in zip(lhs, rhs) for a, b in zip(r1, r2)):
            return False
    return True


def dim_Sg(spec: OrbitSpec, p: int) -> int:
    _, q = nilpotent_representative(spec)
    m = len(_coordinates(spec, q))
    return comb(m + p - 1, p)


def oracle_details(plan: SamplePlan, p: int) -> dict:
    """Stabilized evaluation rank with the counts used."""
    spec = plan.spec
    _, q = nilpotent_representative(spec)
    coords = _coordinates(spec, q)
    monos = monomials_of_degree(len(coords), p)
    base = plan.count or (len(monos) + 4)
    if base < len(monos):
        raise ValueError(f"sample count {base} below dim S(g)[{p}] = {len(monos)}")
    stream = _point_stream(plan)
    ech = IntegerEchelon()
    used = 0
    ranks = []
    target = base
    for _ in range(3):
        while used < target:
            pt = next(stream)
            vals = [pt[i][j] for i, j in coords]
            row = {}
            for c, e in enumerate(monos):
                v = 1
                for x, a in zip(vals, e):
                    if a:
                        v *= x ** a
                if v:
                    row[c] = v
            ech.add(row)
            used += 1
        ranks.append((used, ech.rank))
        if len(ranks) >= 2 and ranks[-1][1] == ranks[-2][1]:
            return {"p": p, "rank": ech.rank, "counts": [c for c, _ in ranks],
                    "ranks": [r for _, r in ranks], "dim_Sg": len(monos), "plan": plan.to_json()}
        target *= 2
    raise RankUnstable(f"rank did not stabilize: {ranks}")


def orbit_coordinate_dim(plan: SamplePlan, p: int) -> int:
    return oracle_details(plan, p)["rank"]
