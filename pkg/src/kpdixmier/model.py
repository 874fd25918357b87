"""The ladder symplectic model of a classical nilpotent orbit closure.

L is a sum of Hom spaces between the ladder levels V_0 ⊃ V_1 ⊃ ... ⊃ V_r.
Points of L are flat coordinate vectors; every group or Lie algebra element
is turned into an explicit matrix acting on those vectors.

Conventions (recorded in ``KPModel.metadata``):

* Poisson tensor on L* is Ω^{-1}: ``{z_k, z_l} = (Ω^{-1})[k][l]``.
* The Hamiltonian of a Lie algebra element acting by the matrix X on L is
  ``H_X(m) = -1/2 Ω(X m, m)``.  Then ``{H_X, z} = -z∘X`` for linear z and
  X -> H_X is a Lie algebra homomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .classical import (
    KIND_NONE,
    KIND_ORTH,
    LieBasis,
    bracket,
    lie_basis,
    split_gram,
    split_reflection,
)
from .linalg import identity, mat_inv, mat_mul, mat_transpose, zeros
from .orbits import LadderData, OrbitSpec, ladder
from .poly import OmegaData, SparsePoly, VariableRegistry, poisson_bracket

ONE = Fraction(1)
HALF = Fraction(1, 2)


class ModelInconsistency(RuntimeError):
    pass


class DegenerateOmega(RuntimeError):
    pass


@dataclass(frozen=True)
class Block:
    name: str  # "A", "B" or "C"
    level: int  # e in 1..r
    tgt: int  # matrix rows live in V_tgt
    src: int  # matrix columns live in V_src
    rows: int
    cols: int
    offset: int

    def index(self, i: int, j: int) -> int:
        return self.offset + i * self.cols + j


@dataclass(frozen=True)
class Reflection:
    level: int
    on_space: tuple  # matrix on V_level
    on_L: tuple  # matrix on coordinate vectors of L


@dataclass
class KPModel:
    spec: OrbitSpec
    ladder: LadderData
    grams: tuple
    blocks: tuple[Block, ...]
    registry: VariableRegistry
    omega: OmegaData
    g_basis: LieBasis
    g_actions: list
    s_levels: list  # [(level, LieBasis)]
    s_elements: list  # [(level, local index)]
    s_actions: list
    s_structure: dict  # (i, j) -> coordinate list in the s-basis
    g_structure: dict
    gamma_polys: list
    sigma_polys: list
    s_reflections: list
    g_reflections: list
    g_weights: list  # root of each g-basis element under the G torus
    s_weights: list  # root of each s-basis element under the full S torus
    coord_gweights: list
    coord_sweights: list
    metadata: dict = field(default_factory=dict)

    @property
    def dim_L(self) -> int:
        return len(self.registry)

    @property
    def dim_s(self) -> int:
        return len(self.s_elements)

    @property
    def dim_g(self) -> int:
        return len(self.g_basis)

    def s_matrix(self, i: int):
        level, local = self.s_elements[i]
        basis = dict(self.s_levels)[level]
        return level, basis.elements[local]

    def cartan_involution(self, x):
        """ς(x) = -conj(x)^T for a matrix x on a level space."""
        return [[-v for v in row] for row in mat_transpose(x)]


# --- construction helpers -------------------------------------------------

def _blocks_for(spec: OrbitSpec, lad: LadderData) -> list[Block]:
    blocks = []
    off = 0
    d = lad.dims
    for e in range(1, lad.r + 1):
        if spec.group == "GL":
            a = Block("A", e, e - 1, e, d[e - 1], d[e], off)
            off += a.rows * a.cols
            blocks.append(a)
            b = Block("B", e, e, e - 1, d[e], d[e - 1], off)
            off += b.rows * b.cols
            blocks.append(b)
        else:
            c = Block("C", e, e - 1, e, d[e - 1], d[e], off)
            off += c.rows * c.cols
            blocks.append(c)
    return blocks


def _coord_names(blocks) -> list[str]:
    names = []
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                names.append(f"{b.name.lower()}{b.level}_{i + 1}_{j + 1}")
    return names


def _block_matrix(vec, b: Block):
    return [[vec[b.index(i, j)] for j in range(b.cols)] for i in range(b.rows)]


def _write_block(vec, b: Block, m):
    for i in range(b.rows):
        for j in range(b.cols):
            vec[b.index(i, j)] = m[i][j]


def _unit_vec(n: int, k: int):
    v = [Fraction(0)] * n
    v[k] = ONE
    return v


def _linear_map(n: int, fn):
    """Matrix (rows = output coordinate) of the linear map fn on points of L."""
    cols = [fn(_unit_vec(n, k)) for k in range(n)]
    return [[cols[l][k] for l in range(n)] for k in range(n)]


def lie_action_matrix(blocks, n: int, level: int, x):
    """Derivative of the G×S action for a Lie element x at ``level``."""
    neg = [[-v for v in r] for r in x]

    def fn(vec):
        out = [Fraction(0)] * n
        for b in blocks:
            m = _block_matrix(vec, b)
            if b.tgt == level:
                _write_block(out, b, mat_mul(x, m))
            elif b.src == level:
                _write_block(out, b, mat_mul(m, neg))
        return out

    return _linear_map(n, fn)


def group_action_matrix(blocks, n: int, level: int, g):
    ginv = mat_inv(g)

    def fn(vec):
        out = list(vec)
        for b in blocks:
            m = _block_matrix(vec, b)
            if b.tgt == level:
                _write_block(out, b, mat_mul(g, m))
            elif b.src == level:
                _write_block(out, b, mat_mul(m, ginv))
        return out

    return _linear_map(n, fn)


def _trace(m) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


def _omega_matrix(spec, blocks, grams, n):
    by_level: dict[int, dict[str, Block]] = {}
    for b in blocks:
        by_level.setdefault(b.level, {})[b.name] = b
    qinv = {e: mat_inv(q) for e, q in enumerate(grams) if q is not None}

    def omega(x, y):
        total = Fraction(0)
        for e, bl in by_level.items():
            if spec.group == "GL":
                a, bb = bl["A"], bl["B"]
                total += _trace(mat_mul(_block_matrix(x, a), _block_matrix(y, bb)))
                total -= _trace(mat_mul(_block_matrix(x, bb), _block_matrix(y, a)))
            else:
                c = bl["C"]
                cx = _block_matrix(x, c)
                adj = mat_mul(mat_mul(qinv[e], mat_transpose(cx)), grams[e - 1])
                total += _trace(mat_mul(adj, _block_matrix(y, c)))
        return total

    units = [_unit_vec(n, k) for k in range(n)]
    return [[omega(units[k], units[l]) for l in range(n)] for k in range(n)]


def hamiltonian(registry: VariableRegistry, omega_m, x_L) -> SparsePoly:
    """H_X(m) = -1/2 Ω(X m, m) as an explicit quadratic polynomial."""
    n = len(registry)
    k = mat_mul(mat_transpose(x_L), omega_m)  # m^T X^T Ω m
    terms: dict = {}
    for a in range(n):
        for b in range(n):
            c = k[a][b]
            if not c:
                continue
            e = [0] * n
            e[a] += 1
            e[b] += 1
            e = tuple(e)
            terms[e] = terms.get(e, Fraction(0)) - HALF * c
    return SparsePoly(registry, terms)


def _poly_matrix(registry, b: Block):
    return [[registry.var(b.index(i, j)) for j in range(b.cols)] for i in range(b.rows)]


def _pm_mul(a, b):
    out = []
    for row in a:
        r = []
        for j in range(len(b[0])):
            acc = None
            for k, x in enumerate(row):
                y = b[k][j]
                t = x * y if isinstance(x, SparsePoly) else y * x
                acc = t if acc is None else acc + t
            r.append(acc)
        out.append(r)
    return out


def _pm_trace_with(m, x, reg) -> SparsePoly:
    """tr(m x) for a polynomial matrix m and a scalar matrix x."""
    acc = reg.zero()
    for i in range(len(m)):
        for k in range(len(x)):
            if x[k][i]:
                acc = acc + m[i][k] * x[k][i]
    return acc


def trace_moment_polys(model: "KPModel"):
    """γ and σ from the explicit trace formulas (-A1B1 / -C1C1*, B A - A B / C*C - C C*)."""
    reg = model.registry
    spec = model.spec
    r = model.ladder.r
    bl = {(b.name, b.level): b for b in model.blocks}
    P = {k: _poly_matrix(reg, b) for k, b in bl.items()}

    def neg(m):
        return [[-x for x in row] for row in m]

    def sub(a, b):
        return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

    if spec.group == "GL":
        gamma_m = neg(_pm_mul(P["A", 1], P["B", 1]))
        sig = {}
        for e in range(1, r + 1):
            m = _pm_mul(P["B", e], P["A", e])
            if e < r:
                m = sub(m, _pm_mul(P["A", e + 1], P["B", e + 1]))
            sig[e] = m
    else:
        def adj(e):
            c = P["C", e]
            q_e_inv = mat_inv(model.grams[e])
            q_prev = model.grams[e - 1]
            ct = [list(col) for col in zip(*c)]
            left = [[sum((q_e_inv[i][k] * ct[k][j] for k in range(len(ct)) if q_e_inv[i][k]), reg.zero())
                     for j in range(len(ct[0]))] for i in range(len(q_e_inv))]
            return [[sum((left[i][k] * q_prev[k][j] for k in range(len(q_prev)) if q_prev[k][j]), reg.zero())
                     for j in range(len(q_prev[0]))] for i in range(len(left))]

        gamma_m = neg(_pm_mul(P["C", 1], adj(1)))
        sig = {}
        for e in range(1, r + 1):
            m = _pm_mul(adj(e), P["C", e])
            if e < r:
                m = sub(m, _pm_mul(P["C", e + 1], adj(e + 1)))
            sig[e] = m
    gammas = [_pm_trace_with(gamma_m, y, reg) for y in model.g_basis.elements]
    sigmas = []
    for i in range(model.dim_s):
        level, x = model.s_matrix(i)
        sigmas.append(_pm_trace_with(sig[level], x, reg))
    return gammas, sigmas


def _common_ratio(canon, trace):
    ratio = None
    for c, p in zip(canon, trace):
        if c.is_zero() and p.is_zero():
            continue
        if p.is_zero() or c.is_zero():
            return None
        e = next(iter(p.terms))
        t = c.terms.get(e, Fraction(0)) / p.terms[e]
        if c != p.scale(t):
            return None
        if ratio is None:
            ratio = t
        elif ratio != t:
            return None
    return ratio


def _diag(m):
    n = len(m)
    if any(m[i][j] for i in range(n) for j in range(n) if i != j):
        return None
    return [m[i][i] for i in range(n)]


def build_model(spec: OrbitSpec) -> KPModel:
    lad = ladder(spec)
    grams = tuple(split_gram(k, d) for k, d in zip(lad.form_kinds, lad.dims))
    blocks = _blocks_for(spec, lad)
    names = _coord_names(blocks)
    reg = VariableRegistry(tuple(names))
    n = len(reg)
    om = _omega_matrix(spec, blocks, grams, n)
    try:
        omega = OmegaData(reg, om)
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelInconsistency(f"level form is not symplectic: {exc}") from exc
    # Ω must be a signed permutation (orthogonal with Ω² = -1) for the Fock frame
    sq = mat_mul(om, om)
    if sq != [[-v for v in row] for row in identity(n)]:
        raise ModelInconsistency("Ω is not compatible with the identity Hermitian form")

    g_basis = lie_basis(lad.form_kinds[0], lad.dims[0], grams[0])
    g_actions = [lie_action_matrix(blocks, n, 0, x) for x in g_basis.elements]
    s_levels = []
    s_elements = []
    s_actions = []
    for e in range(1, lad.r + 1):
        b = lie_basis(lad.form_kinds[e], lad.dims[e], grams[e])
        s_levels.append((e, b))
        for i, x in enumerate(b.elements):
            s_elements.append((e, i))
            s_actions.append(lie_action_matrix(blocks, n, e, x))

    # torus weights
    def coord_weights(actions, cartan_ids):
        w = [[] for _ in range(n)]
        for c in cartan_ids:
            dg = _diag(actions[c])
            if dg is None:
                raise ModelInconsistency("Cartan element does not act diagonally on coordinates")
            for k in range(n):
                w[k].append(-int(dg[k]))
        return w

    coord_g = coord_weights(g_actions, g_basis.cartan)
    s_cartan_ids = []
    s_weights = []
    offset_w = 0
    ranks = []
    for e, b in s_levels:
        ranks.append(len(b.cartan))
    total_rank = sum(ranks)
    for idx, (e, b) in enumerate(s_levels):
        start = sum(ranks[:idx])
        base = sum(len(bb) for _, bb in s_levels[:idx])
        for c in b.cartan:
            s_cartan_ids.append(base + c)
        for wt in b.weights:
            full = [0] * total_rank
            full[start:start + len(wt)] = wt
            s_weights.append(tuple(full))
    coord_s = coord_weights(s_actions, s_cartan_ids)

    s_structure = {}
    for i in range(len(s_elements)):
        for j in range(len(s_elements)):
            li, xi = s_elements[i]
            lj, xj = s_elements[j]
            if li != lj:
                continue
            b = dict(s_levels)[li]
            local = b.structure(xi, xj)
            base = next(k for k, (lv, _) in enumerate(s_elements) if lv == li)
            s_structure[i, j] = {base + k: v for k, v in enumerate(local) if v}
    g_structure = {}
    for i in range(len(g_basis)):
        for j in range(len(g_basis)):
            g_structure[i, j] = {k: v for k, v in enumerate(g_basis.structure(i, j)) if v}

    gamma = [hamiltonian(reg, om, x) for x in g_actions]
    sigma = [hamiltonian(reg, om, x) for x in s_actions]

    s_refl = []
    for e in range(1, lad.r + 1):
        if lad.form_kinds[e] == KIND_ORTH:
            rho = split_reflection(lad.dims[e])
            s_refl.append(Reflection(e, _freeze(rho), _freeze(group_action_matrix(blocks, n, e, rho))))
    g_refl = []
    if lad.form_kinds[0] == KIND_ORTH:
        rho = split_reflection(lad.dims[0])
        g_refl.append(Reflection(0, _freeze(rho), _freeze(group_action_matrix(blocks, n, 0, rho))))

    model = KPModel(
        spec=spec,
        ladder=lad,
        grams=grams,
        blocks=tuple(blocks),
        registry=reg,
        omega=omega,
        g_basis=g_basis,
        g_actions=g_actions,
        s_levels=s_levels,
        s_elements=s_elements,
        s_actions=s_actions,
        s_structure=s_structure,
        g_structure=g_structure,
        gamma_polys=gamma,
        sigma_polys=sigma,
        s_reflections=s_refl,
        g_reflections=g_refl,
        g_weights=list(g_basis.weights),
        s_weights=s_weights,
        coord_gweights=[tuple(w) for w in coord_g],
        coord_sweights=[tuple(w) for w in coord_s],
    )
    _check_model(model)
    pg, ps = trace_moment_polys(model)
    model.metadata = {
        "poisson_tensor": "inverse of Omega",
        "hamiltonian": "H_X(m) = -1/2 Omega(X m, m)",
        "level_form": "tr(A B') - tr(B A')" if spec.group == "GL" else "tr(C^* C')",
        "gram_matrices": "split (antidiagonal)",
        "hermitian_form": "identity",
        "gamma_over_trace_formula": _fmt_ratio(_common_ratio(gamma, pg)),
        "sigma_over_trace_formula": _fmt_ratio(_common_ratio(sigma, ps)),
        "xi_normalization": "symbol of xi^x equals the moment polynomial",
    }
    if model.metadata["gamma_over_trace_formula"] is None and model.dim_g:
        raise ModelInconsistency("γ is not proportional to the trace formula")
    if model.metadata["sigma_over_trace_formula"] is None and model.dim_s:
        raise ModelInconsistency("σ is not proportional to the trace formula")
    report = verify_moment_identities(model)
    if not report["passed"]:
        raise ModelInconsistency(f"moment identities fail: {report['failures'][:3]}")
    return model


def _fmt_ratio(r):
    if r is None:
        return None
    return str(r)


def _freeze(m):
    return tuple(tuple(r) for r in m)


def _check_model(model: KPModel) -> None:
    om = model.omega.matrix
    mats = list(model.g_actions) + list(model.s_actions)
    for x in mats:
        lhs = mat_mul(mat_transpose(x), om)
        rhs = mat_mul(om, x)
        if any(a + b for r1, r2 in zip(lhs, rhs) for a, b in zip(r1, r2)):
            raise ModelInconsistency("Ω is not invariant under a Lie algebra action")
    for refl in list(model.s_reflections) + list(model.g_reflections):
        r = [list(row) for row in refl.on_L]
        if mat_mul(mat_mul(mat_transpose(r), om), r) != om:
            raise ModelInconsistency("Ω is not invariant under a reflection")
    for x in model.g_actions:
        for y in model.s_actions:
            if mat_mul(x, y) != mat_mul(y, x):
                raise ModelInconsistency("g- and s-actions do not commute")
    for p in list(model.gamma_polys) + list(model.sigma_polys):
        if not p.is_homogeneous(2):
            raise ModelInconsistency("moment polynomial is not quadratic")


def _combo(polys, coeffs: dict, reg):
    out = reg.zero()
    for k, c in coeffs.items():
        out = out + polys[k].scale(c)
    return out


def moment_sigma(model: KPModel) -> list[SparsePoly]:
    return list(model.sigma_polys)


def moment_gamma(model: KPModel) -> list[SparsePoly]:
    return list(model.gamma_polys)


def verify_moment_identities(model: KPModel) -> dict:
    """Check {γ,γ'} = γ_[,], {σ,σ'} = σ_[,] and {γ,σ} = 0 on full bases."""
    reg, om = model.registry, model.omega
    failures = []
    checked = 0
    g, s = model.gamma_polys, model.sigma_polys
    for i in range(len(g)):
        for j in range(len(g)):
            checked += 1
            if poisson_bracket(g[i], g[j], om) != _combo(g, model.g_structure[i, j], reg):
                failures.append(["gamma", i, j])
    for i in range(len(s)):
        for j in range(len(s)):
            checked += 1
            want = _combo(s, model.s_structure.get((i, j), {}), reg)
            if poisson_bracket(s[i], s[j], om) != want:
                failures.append(["sigma", i, j])
    for i in range(len(g)):
        for j in range(len(s)):
            checked += 1
            if not poisson_bracket(g[i], s[j], om).is_zero():
                failures.append(["gamma-sigma", i, j])
    return {"check": "moment_identities", "pairs_checked": checked, "failures": failures,
            "passed": not failures}


def act_on_poly(x_L, f: SparsePoly) -> SparsePoly:
    """Infinitesimal action on functions: (x·f)(m) = -df_m(X m)."""
    reg = f.registry
    n = len(reg)
    out = reg.zero()
    for k in range(n):
        dk = f.derivative(k)
        if dk.is_zero():
            continue
        lin = SparsePoly(reg, {_unit_tuple(n, l): -x_L[k][l] for l in range(n) if x_L[k][l]})
        out = out + dk * lin
    return out


def group_act_on_poly(g_L, f: SparsePoly) -> SparsePoly:
    """(g·f)(m) = f(g^{-1} m)."""
    return f.substitute_linear(mat_inv([list(r) for r in g_L]))


def _unit_tuple(n, k):
    e = [0] * n
    e[k] = 1
    return tuple(e)


def darboux_frame(model: KPModel) -> list[tuple[dict, dict]]:
    """Symplectic basis (q_i, p_i) of L* with {q_i, p_j} = δ_ij, {q,q} = {p,p} = 0.

    Symplectic Gram-Schmidt over Q on the coordinate functions, in registry
    order; for GL models the A coordinates come first, so the result is the
    natural A/B polarization.
    """
    n = model.dim_L
    pi = model.omega.poisson

    def br(u, v):
        return sum((cu * cv * pi[k][l] for k, cu in u.items() for l, cv in v.items() if pi[k][l]),
                   Fraction(0))

    remaining = [{k: ONE} for k in range(n)]
    frame = []
    while remaining:
        u = remaining.pop(0)
        partner = next((i for i, v in enumerate(remaining) if br(u, v) != 0), None)
        if partner is None:
            raise DegenerateOmega("Ω is degenerate")
        v = remaining.pop(partner)
        c = br(u, v)
        p = {k: x / c for k, x in v.items()}
        q = u
        new = []
        for w in remaining:
            a, b = br(w, p), br(w, q)
            w2 = dict(w)
            for k, x in q.items():
                w2[k] = w2.get(k, Fraction(0)) - a * x
            for k, x in p.items():
                w2[k] = w2.get(k, Fraction(0)) + b * x
            new.append({k: x for k, x in w2.items() if x})
        remaining = new
        frame.append((q, p))
    return frame
