"""The commutative side: S-invariants, the moment ideal and Koszul homology.

Everything is computed degree by degree inside P[j] with monomial columns,
split into blocks of fixed torus weight (G-weight, S-weight).  The
derivations, the moment polynomials and the reflections all respect that
splitting, so ranks can be added block by block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb

from .linalg import SparseEchelon, intersect_subspaces, mat_inv, sparse_kernel
from .poly import SparsePoly, fmt_half, mono_key, monomials_of_degree, natural_degree

ZERO = Fraction(0)
ONE = Fraction(1)


def default_dmax(model) -> int:
    return 3 if model.dim_L <= 10 else 2


# --- weights and monomial blocks -------------------------------------------

def _cache(model) -> dict:
    return model.__dict__.setdefault("_reduction_cache", {})


def mono_weight(model, e: tuple) -> tuple[tuple, tuple]:
    gw = [0] * len(model.g_basis.cartan)
    sw = [0] * (len(model.coord_sweights[0]) if model.coord_sweights else 0)
    for k, a in enumerate(e):
        if a:
            for i, w in enumerate(model.coord_gweights[k]):
                gw[i] += a * w
            for i, w in enumerate(model.coord_sweights[k]):
                sw[i] += a * w
    return tuple(gw), tuple(sw)


def weight_blocks(model, k: int) -> dict[tuple, list[tuple]]:
    """Monomials of natural degree k grouped by (G-weight, S-weight)."""
    c = _cache(model)
    key = ("blocks", k)
    if key not in c:
        blocks: dict = {}
        for e in monomials_of_degree(model.dim_L, k):
            blocks.setdefault(mono_weight(model, e), []).append(e)
        c[key] = blocks
    return c[key]


def _is_zero_weight(w) -> bool:
    return not any(w)


def s_zero_blocks(model, k: int) -> dict[tuple, list[tuple]]:
    """Blocks of S-weight zero, keyed by G-weight."""
    return {gw: ms for (gw, sw), ms in weight_blocks(model, k).items() if _is_zero_weight(sw)}


def _root_s_indices(model) -> list[int]:
    cartan = set()
    base = 0
    for _, b in model.s_levels:
        cartan.update(base + c for c in b.cartan)
        base += len(b)
    return [i for i in range(model.dim_s) if i not in cartan]


def _linear_images(x_L) -> list[list[tuple[int, Fraction]]]:
    """Derivation data: x·z_k = -Σ_l X[k][l] z_l."""
    n = len(x_L)
    return [[(l, -x_L[k][l]) for l in range(n) if x_L[k][l]] for k in range(n)]


def derive_monomial(e: tuple, lin) -> dict:
    out: dict = {}
    for k, a in enumerate(e):
        if not a or not lin[k]:
            continue
        base = list(e)
        base[k] -= 1
        for l, c in lin[k]:
            m = list(base)
            m[l] += 1
            m = tuple(m)
            out[m] = out.get(m, ZERO) + a * c
    return {m: c for m, c in out.items() if c}


def _substitution_images(g_L) -> list[list[tuple[int, Fraction]]]:
    """(g·f)(m) = f(g^{-1} m): z_k -> Σ_l ginv[k][l] z_l."""
    ginv = mat_inv([list(r) for r in g_L])
    n = len(ginv)
    return [[(l, ginv[k][l]) for l in range(n) if ginv[k][l]] for k in range(n)]


def substitute_monomial(e: tuple, images) -> dict:
    cur = {(0,) * len(e): ONE}
    for k, a in enumerate(e):
        for _ in range(a):
            nxt: dict = {}
            for m, c in cur.items():
                for l, x in images[k]:
                    mm = list(m)
                    mm[l] += 1
                    mm = tuple(mm)
                    nxt[mm] = nxt.get(mm, ZERO) + c * x
            cur = {m: c for m, c in nxt.items() if c}
    return cur


def poly_times_monomial(f: SparsePoly, e: tuple) -> dict:
    return {tuple(a + b for a, b in zip(m, e)): c for m, c in f.terms.items()}


# --- subspaces ----------------------------------------------------------------

@dataclass
class SubspaceBasis:
    """Echelonized subspace of P[j], stored block by block.

    ``blocks[key]`` is ``(monomials, rows)`` where rows are sparse dicts over
    indices into ``monomials`` (sorted by the graded-lex key).
    """

    degree: Fraction
    blocks: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return sum(len(rows) for _, rows in self.blocks.values())

    def __len__(self):
        return self.dim

    def vectors(self, registry) -> list[SparsePoly]:
        out = []
        for key in sorted(self.blocks):
            monos, rows = self.blocks[key]
            for r in rows:
                out.append(SparsePoly(registry, {monos[i]: c for i, c in r.items()}))
        return out

    def block_dim(self, key) -> int:
        return len(self.blocks.get(key, ((), []))[1])


def _echelon_rows(vectors) -> list[dict]:
    ech = SparseEchelon()
    for v in vectors:
        ech.add(v)
    red = ech.rref_rows()
    return [red[c] for c in sorted(red)]


def _index(monos):
    return {m: i for i, m in enumerate(monos)}


def invariant_basis(model, j) -> SubspaceBasis:
    """S-invariants in P[j]: joint kernel of the s root derivations, fixed by S-reflections."""
    k = natural_degree(j)
    c = _cache(model)
    key = ("inv", k)
    if key in c:
        return c[key]
    out = SubspaceBasis(Fraction(k, 2))
    roots = [_linear_images(model.s_actions[i]) for i in _root_s_indices(model)]
    refl = [_substitution_images(r.on_L) for r in model.s_reflections]
    for gw, monos in sorted(s_zero_blocks(model, k).items()):
        monos = sorted(monos, key=mono_key)
        equations: dict = {}
        for ci, e in enumerate(monos):
            for ri, lin in enumerate(roots):
                for m, v in derive_monomial(e, lin).items():
                    equations.setdefault(("d", ri, m), {})[ci] = v
            for ri, imgs in enumerate(refl):
                img = substitute_monomial(e, imgs)
                img[e] = img.get(e, ZERO) - ONE
                for m, v in img.items():
                    if v:
                        row = equations.setdefault(("r", ri, m), {})
                        row[ci] = row.get(ci, ZERO) + v
        rows = [r for r in equations.values() if any(r.values())]
        kernel = sparse_kernel([{a: b for a, b in r.items() if b} for r in rows], len(monos))
        if kernel:
            out.blocks[gw] = (monos, _echelon_rows(kernel))
    c[key] = out
    return out


def _ideal_block_rows(model, k, wkey, monos) -> list[dict]:
    """Products σ_x·m landing in the weight block ``wkey`` of P at natural degree k."""
    idx = _index(monos)
    rows = []
    gw, sw = wkey
    if k < 2:
        return rows
    lower = weight_blocks(model, k - 2)
    for i, sigma in enumerate(model.sigma_polys):
        alpha = model.s_weights[i]
        need = (gw, tuple(a - b for a, b in zip(sw, alpha)))
        for e in lower.get(need, ()):
            rows.append({idx[m]: c for m, c in poly_times_monomial(sigma, e).items()})
    return rows


def ideal_block(model, k: int, wkey) -> tuple[list, list[dict]]:
    c = _cache(model)
    key = ("ideal", k, wkey)
    if key not in c:
        monos = sorted(weight_blocks(model, k).get(wkey, []), key=mono_key)
        c[key] = (monos, _echelon_rows(_ideal_block_rows(model, k, wkey, monos)))
    return c[key]


def ideal_degree(model, j, s_zero_only: bool = False) -> SubspaceBasis:
    """I[j] = Σ_x σ_x·P[j-1], block by block (optionally only S-weight zero)."""
    k = natural_degree(j)
    out = SubspaceBasis(Fraction(k, 2))
    for wkey in sorted(weight_blocks(model, k)):
        if s_zero_only and not _is_zero_weight(wkey[1]):
            continue
        monos, rows = ideal_block(model, k, wkey)
        if rows:
            out.blocks[wkey] = (monos, rows)
    return out


def ideal_dim(model, k: int) -> int:
    return sum(len(ideal_block(model, k, w)[1]) for w in weight_blocks(model, k))


def invariant_ideal(model, j) -> SubspaceBasis:
    """I^inv[j] = I[j] ∩ P^inv[j]."""
    k = natural_degree(j)
    inv = invariant_basis(model, j)
    out = SubspaceBasis(Fraction(k, 2))
    zero_s = None
    for gw, (monos, inv_rows) in sorted(inv.blocks.items()):
        if zero_s is None:
            zero_s = tuple(0 for _ in (model.coord_sweights[0] if model.coord_sweights else ()))
        imonos, irows = ideal_block(model, k, (gw, zero_s))
        if not irows:
            continue
        assert imonos == monos
        common = intersect_subspaces(inv_rows, irows)
        if common:
            out.blocks[gw] = (monos, _echelon_rows(common))
    return out


@dataclass
class HilbertRow:
    j: int
    dim_P: int
    dim_Pinv: int
    dim_I: int
    dim_Iinv: int
    quotient: int
    oracle: int | None = None

    @property
    def matches(self):
        return None if self.oracle is None else self.oracle == self.quotient

    def to_json(self):
        d = {"j": self.j, "dim_P": self.dim_P, "dim_Pinv": self.dim_Pinv, "dim_I": self.dim_I,
             "dim_Iinv": self.dim_Iinv, "quotient": self.quotient}
        if self.oracle is not None:
            d["oracle"] = self.oracle
            d["match"] = self.matches
        return d


@dataclass
class HilbertTable:
    spec: object
    rows: list

    def quotient_dims(self) -> list[int]:
        return [r.quotient for r in self.rows]

    def to_json(self):
        return {"spec": self.spec.to_json(), "rows": [r.to_json() for r in self.rows]}

    CSV_COLUMNS = ("j", "dim_P", "dim_Pinv", "dim_I", "dim_Iinv", "quotient", "oracle")

    def csv_rows(self):
        return [[getattr(r, c) if getattr(r, c) is not None else "" for c in self.CSV_COLUMNS]
                for r in self.rows]


def hilbert_row(model, j: int, with_full_ideal: bool = True) -> HilbertRow:
    k = natural_degree(j)
    dim_p = comb(model.dim_L + k - 1, k)
    inv = invariant_basis(model, j)
    iinv = invariant_ideal(model, j)
    dim_i = ideal_dim(model, k) if with_full_ideal else -1
    return HilbertRow(j, dim_p, inv.dim, dim_i, iinv.dim, inv.dim - iinv.dim)


def reduced_hilbert(model, dmax: int, oracle=None, with_full_ideal: bool = True) -> HilbertTable:
    """Rows j = 0..dmax of dim (P^inv/I^inv)^j, optionally compared with an oracle callable."""
    rows = []
    for j in range(dmax + 1):
        row = hilbert_row(model, j, with_full_ideal)
        if oracle is not None:
            row.oracle = oracle(j)
        rows.append(row)
    return HilbertTable(model.spec, rows)


# --- Koszul complex -------------------------------------------------------------

def _koszul_basis(model, t: int, k: int) -> dict:
    """Basis of ∧^t s ⊗ P[k-2t] by total weight: key -> list of (subset, monomial)."""
    out: dict = {}
    if k - 2 * t < 0:
        return out
    lower = weight_blocks(model, k - 2 * t)
    for subset in combinations(range(model.dim_s), t):
        asw = [0] * (len(model.s_weights[0]) if model.s_weights else 0)
        for i in subset:
            asw = [a + b for a, b in zip(asw, model.s_weights[i])]
        for (gw, sw), monos in lower.items():
            key = (gw, tuple(a + b for a, b in zip(sw, asw)))
            out.setdefault(key, []).extend((subset, e) for e in monos)
    return out


def koszul_rank(model, t: int, k: int) -> int:
    """Rank of ∂_0: ∧^t s ⊗ P[k-2t] -> ∧^{t-1} s ⊗ P[k-2t+2], natural total degree k."""
    if t == 0 or t > model.dim_s or k - 2 * t < 0:
        return 0
    c = _cache(model)
    key = ("krank", t, k)
    if key in c:
        return c[key]
    if t == 1:
        c[key] = ideal_dim(model, k)
        return c[key]
    src = _koszul_basis(model, t, k)
    total = 0
    for wkey, basis in src.items():
        tgt_index: dict = {}
        ech = SparseEchelon()
        for subset, e in basis:
            row: dict = {}
            for l, i in enumerate(subset):
                rest = subset[:l] + subset[l + 1:]
                sign = -1 if (l + 1) % 2 else 1  # (-1)^l with l counted from 1
                for m, v in poly_times_monomial(model.sigma_polys[i], e).items():
                    col = tgt_index.setdefault((rest, m), len(tgt_index))
                    row[col] = row.get(col, ZERO) + sign * 2 * v
            ech.add({a: b for a, b in row.items() if b})
        total += ech.rank
    c[key] = total
    return total


def koszul_dim(model, t: int, k: int) -> int:
    if k - 2 * t < 0 or t > model.dim_s:
        return 0
    return comb(model.dim_s, t) * comb(model.dim_L + k - 2 * t - 1, k - 2 * t)


def koszul_homology_window(model, dmax, tmax: int | None = None) -> list[dict]:
    """dim H_t of the Koszul complex of the σ's at each natural degree k ≤ 2·dmax."""
    kmax = natural_degree(dmax)
    if tmax is None:
        tmax = min(2, model.dim_s)
    if tmax > model.dim_s:
        raise ValueError("tmax exceeds dim s")
    rows = []
    for k in range(kmax + 1):
        h = {}
        for t in range(tmax + 1):
            h[t] = koszul_dim(model, t, k) - koszul_rank(model, t, k) - koszul_rank(model, t + 1, k)
        rows.append({"k": k, "degree": fmt_half(k), "H": h,
                     "dim_P_over_I": koszul_dim(model, 0, k) - koszul_rank(model, 1, k)})
    return rows


def ci_series(m: int, n: int, kmax: int) -> list[int]:
    """Coefficients of (1 - t^2)^m / (1 - t)^n up to t^kmax."""
    num = [0] * (kmax + 1)
    for i in range(m + 1):
        if 2 * i <= kmax:
            num[2 * i] = (-1) ** i * comb(m, i)
    out = []
    for k in range(kmax + 1):
        out.append(sum(num[a] * comb(n + k - a - 1, k - a) for a in range(k + 1) if num[a]) if n else
                   num[k])
    return out


def complete_intersection_check(model, dmax) -> dict:
    kmax = natural_degree(dmax)
    series = ci_series(model.dim_s, model.dim_L, kmax)
    rows = []
    for k in range(kmax + 1):
        got = koszul_dim(model, 0, k) - koszul_rank(model, 1, k)
        rows.append({"k": k, "dim_P_over_I": got, "series": series[k], "match": got == series[k]})
    return {"check": "complete_intersection", "m": model.dim_s, "N": model.dim_L, "rows": rows,
            "passed": all(r["match"] for r in rows)}


def gamma_image_check(model, p: int) -> dict:
    """Rank of degree-p products of the γ's modulo I^inv[p], per G-weight block."""
    k = natural_degree(p)
    zero_s = tuple(0 for _ in (model.coord_sweights[0] if model.coord_sweights else ()))
    by_block: dict = {}
    for word in combinations_with_replacement(range(model.dim_g), p):
        f = model.registry.one()
        for i in word:
            f = f * model.gamma_polys[i]
        if f.is_zero():
            continue
        gw = mono_weight(model, next(iter(f.terms)))[0]
        by_block.setdefault(gw, []).append(f)
    total = 0
    for gw, polys in by_block.items():
        monos, irows = ideal_block(model, k, (gw, zero_s))
        idx = _index(monos)
        ech = SparseEchelon()
        for r in irows:
            ech.add(r)
        base = ech.rank
        for f in polys:
            ech.add({idx[m]: c for m, c in f.terms.items()})
        total += ech.rank - base
    expected = hilbert_row(model, p, with_full_ideal=False).quotient
    return {"check": "gamma_image", "p": p, "rank": total, "expected": expected, "passed": total == expected}


def poisson_closure_check(model, j) -> dict:
    """{P^inv[1], I^inv[j]} ⊆ I^inv[j]."""
    from .poly import poisson_bracket
    k = natural_degree(j)
    reg = model.registry
    gens = invariant_basis(model, 1).vectors(reg)
    iinv = invariant_ideal(model, j)
    target = {gw: (monos, rows) for gw, (monos, rows) in iinv.blocks.items()}
    bad = 0
    for f in gens:
        for h in iinv.vectors(reg):
            b = poisson_bracket(f, h, model.omega)
            if b.is_zero():
                continue
            gw = mono_weight(model, next(iter(b.terms)))[0]
            if gw not in target:
                bad += 1
                continue
            monos, rows = target[gw]
            idx = _index(monos)
            ech = SparseEchelon()
            for r in rows:
                ech.add(r)
            if not ech.contains({idx[m]: c for m, c in b.terms.items()}):
                bad += 1
    return {"check": "poisson_closure", "j": k / 2, "failures": bad, "passed": bad == 0}
