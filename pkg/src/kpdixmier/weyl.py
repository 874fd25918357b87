"""Weyl algebra of a ladder model with exact normal-ordered arithmetic.

The coordinates of L come in canonical pairs (q, p) because the model's Ω is
a signed permutation.  A normal-ordered monomial is stored as the same dense
exponent tuple used for commutative polynomials; within each pair the
q-power is written to the left of the p-power, and different pairs commute.
The defining relation is ``[ẑ_k, ẑ_l] = {z_k, z_l}``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Mapping, Sequence

from .classical import solve_in_basis
from .linalg import SparseEchelon
from .poly import SparsePoly, mono_key
from .scalars import I, QI, conj, fmt_scalar

ZERO = Fraction(0)
ONE = Fraction(1)


class FrameMismatch(ValueError):
    pass


class DegreeTooSmall(ValueError):
    pass


class NotInSpan(ValueError):
    pass


class InvolutionInconsistency(RuntimeError):
    pass


class WeylFrame:
    """Pairing of coordinates into canonical pairs and the normal order."""

    def __init__(self, registry, pairs: Sequence[tuple[int, int]], kappas: Sequence[Fraction], label="q-first"):
        self.registry = registry
        self.n = len(registry)
        self.pairs = tuple(tuple(p) for p in pairs)
        self.kappas = tuple(Fraction(k) for k in kappas)  # κ = [p̂, q̂]
        self.label = label
        covered = sorted(k for p in self.pairs for k in p)
        if covered != list(range(self.n)):
            raise FrameMismatch("frame pairs must cover every coordinate exactly once")
        self._mul_cache: dict = {}

    @property
    def names(self):
        return self.registry.names

    def key(self):
        return (self.registry.names, self.pairs, self.kappas)

    def swapped(self) -> "WeylFrame":
        """The frame with the roles of q and p exchanged in every pair."""
        return WeylFrame(self.registry, [(p, q) for q, p in self.pairs], [-k for k in self.kappas],
                         label="p-first" if self.label == "q-first" else "q-first")

    def mono_mul(self, u: tuple, v: tuple) -> list[tuple[tuple, Fraction]]:
        """Normal-ordered expansion of (monomial u)·(monomial v)."""
        ck = (u, v)
        hit = self._mul_cache.get(ck)
        if hit is not None:
            return hit
        base = [a + b for a, b in zip(u, v)]
        options = []
        for (q, p), kappa in zip(self.pairs, self.kappas):
            b, c = u[p], v[q]
            if b and c:
                opts = []
                for k in range(min(b, c) + 1):
                    opts.append((q, p, k, factorial(k) * comb(b, k) * comb(c, k) * kappa ** k))
                options.append(opts)
        result = [(tuple(base), ONE)]
        for opts in options:
            nxt = []
            for mono, coef in result:
                for q, p, k, w in opts:
                    if k == 0:
                        nxt.append((mono, coef * w))
                    else:
                        m = list(mono)
                        m[q] -= k
                        m[p] -= k
                        nxt.append((tuple(m), coef * w))
            result = nxt
        if len(self._mul_cache) > 400000:
            self._mul_cache.clear()
        self._mul_cache[ck] = result
        return result

    def word_text(self, e: tuple) -> str:
        parts = []
        for q, p in self.pairs:
            for k in (q, p):
                if e[k] == 1:
                    parts.append(self.names[k])
                elif e[k]:
                    parts.append(f"{self.names[k]}^{e[k]}")
        return "*".join(parts)


class WeylElement:
    __slots__ = ("frame", "terms", "_hash")

    def __init__(self, frame: WeylFrame, terms: Mapping[tuple, object] | None = None):
        self.frame = frame
        self.terms = {e: c for e, c in (terms or {}).items() if c}
        self._hash = None

    # construction
    @classmethod
    def scalar(cls, frame, c) -> "WeylElement":
        return cls(frame, {(0,) * frame.n: c})

    @classmethod
    def one(cls, frame) -> "WeylElement":
        return cls.scalar(frame, ONE)

    @classmethod
    def gen(cls, frame, k: int) -> "WeylElement":
        e = [0] * frame.n
        e[k] = 1
        return cls(frame, {tuple(e): ONE})

    @classmethod
    def normal_monomial(cls, frame, e: tuple, c=ONE) -> "WeylElement":
        return cls(frame, {tuple(e): c})

    def _check(self, other):
        if other.frame is not self.frame and other.frame.key() != self.frame.key():
            raise FrameMismatch("elements live in different frames")

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, WeylElement):
            other = WeylElement.scalar(self.frame, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, ZERO) + c
        return WeylElement(self.frame, t)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.frame, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, WeylElement):
            other = WeylElement.scalar(self.frame, other)
        return self + (-other)

    def scale(self, c) -> "WeylElement":
        if not c:
            return WeylElement(self.frame)
        return WeylElement(self.frame, {e: x * c for e, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return weyl_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            if self.terms and set(self.terms) != {(0,) * self.frame.n}:
                return False
            return self.terms.get((0,) * self.frame.n, ZERO) == other
        return self.frame.key() == other.frame.key() and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # degrees
    def natural_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def filtration_degree(self) -> Fraction:
        return Fraction(max(self.natural_degree(), 0), 2)

    def is_even(self) -> bool:
        return all(sum(e) % 2 == 0 for e in self.terms)

    def part_of_degree(self, k: int) -> "WeylElement":
        return WeylElement(self.frame, {e: c for e, c in self.terms.items() if sum(e) == k})

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in sorted(self.terms.items(), key=lambda t: mono_key(t[0])):
            w = self.frame.word_text(e)
            s = fmt_scalar(c)
            if not w:
                out.append(s)
            elif c == 1:
                out.append(w)
            elif c == -1:
                out.append("-" + w)
            elif isinstance(c, QI):
                out.append(f"({s})*{w}")
            else:
                out.append(f"{s}*{w}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self):
        return f"WeylElement({self.to_text()})"


def weyl_mul(a: WeylElement, b: WeylElement) -> WeylElement:
    a._check(b)
    frame = a.frame
    out: dict = {}
    for u, cu in a.terms.items():
        for v, cv in b.terms.items():
            c = cu * cv
            for e, w in frame.mono_mul(u, v):
                out[e] = out.get(e, ZERO) + c * w
    return WeylElement(frame, out)


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return weyl_mul(a, b) - weyl_mul(b, a)


def symbol(D: WeylElement, d) -> SparsePoly:
    """Image of D ∈ W_d in W_d / W_{d-1/2} ≅ P[d]."""
    k = int(Fraction(d) * 2)
    if D.natural_degree() > k:
        raise DegreeTooSmall(f"element has natural degree {D.natural_degree()} > {k}")
    return SparsePoly(D.frame.registry, {e: c for e, c in D.terms.items() if sum(e) == k})


def quantize_quadratic(frame: WeylFrame, f: SparsePoly) -> WeylElement:
    """Symmetrization of a quadratic polynomial: z_k z_l -> (ẑ_k ẑ_l + ẑ_l ẑ_k)/2."""
    if not f.is_homogeneous(2):
        raise ValueError("quantize_quadratic needs a homogeneous quadratic")
    out = WeylElement(frame, dict(f.terms))
    corr = ZERO
    for (q, p), kappa in zip(frame.pairs, frame.kappas):
        e = [0] * frame.n
        e[q] += 1
        e[p] += 1
        c = f.terms.get(tuple(e))
        if c:
            # q̂p̂ is normal; (q̂p̂ + p̂q̂)/2 = q̂p̂ + κ/2
            corr += c * kappa / 2
    return out + corr if corr else out


def substitute_generators(D: WeylElement, images: Sequence[WeylElement], antilinear=False) -> WeylElement:
    """Image of D under the (anti)linear algebra map ẑ_k -> images[k]."""
    frame = images[0].frame if images else D.frame
    powers: dict = {}

    def power(k, a):
        key = (k, a)
        if key not in powers:
            if a == 0:
                powers[key] = WeylElement.one(frame)
            else:
                powers[key] = weyl_mul(power(k, a - 1), images[k])
        return powers[key]

    out = WeylElement(frame)
    for e, c in D.terms.items():
        term = WeylElement.scalar(frame, conj(c) if antilinear else c)
        for q, p in D.frame.pairs:
            if e[q]:
                term = weyl_mul(term, power(q, e[q]))
            if e[p]:
                term = weyl_mul(term, power(p, e[p]))
        out = out + term
    return out


def linear_images(frame: WeylFrame, matrix) -> list[WeylElement]:
    """ẑ_k -> Σ_l matrix[l][k] ẑ_l."""
    n = frame.n
    return [WeylElement(frame, {_unit(n, l): matrix[l][k] for l in range(n) if matrix[l][k]})
            for k in range(n)]


def to_frame(D: WeylElement, frame: WeylFrame) -> WeylElement:
    """Rewrite D in the normal order of another frame on the same coordinates."""
    if D.frame.registry.names != frame.registry.names:
        raise FrameMismatch("frames live on different coordinates")
    gens = [WeylElement.gen(frame, k) for k in range(frame.n)]
    return substitute_generators(D, gens)


def _unit(n, k):
    e = [0] * n
    e[k] = 1
    return tuple(e)


def involution_tau(D: WeylElement) -> WeylElement:
    """Linear anti-automorphism with τ(ẑ) = i ẑ on every generator."""
    frame = D.frame
    out = WeylElement(frame)
    for e, c in D.terms.items():
        # reversed word: pairs commute, so reverse inside each pair
        term = WeylElement.scalar(frame, c * I ** sum(e) if sum(e) % 4 else c)
        for q, p in frame.pairs:
            if e[p] or e[q]:
                pe = [0] * frame.n
                pe[p] = e[p]
                qe = [0] * frame.n
                qe[q] = e[q]
                piece = weyl_mul(WeylElement.normal_monomial(frame, tuple(pe)),
                                 WeylElement.normal_monomial(frame, tuple(qe)))
                term = weyl_mul(term, piece)
        out = out + term
    return out


class WeylModel:
    """A model together with a frame, the ξ embeddings and the involutions."""

    def __init__(self, model, frame: WeylFrame | None = None):
        self.model = model
        self.frame = frame or frame_from_model(model)
        fr = self.frame
        self.xi_g = [quantize_quadratic(fr, f) for f in model.gamma_polys]
        self.xi_s = [quantize_quadratic(fr, f) for f in model.sigma_polys]
        self.gens = [WeylElement.gen(fr, k) for k in range(fr.n)]
        self.theta_matrix, self.theta_sign = self._choose_theta()
        self._theta_images = linear_images(fr, self.theta_matrix)

    def _choose_theta(self):
        om = self.model.omega.matrix
        for sign in (1, -1):
            phi = [[sign * v for v in row] for row in om]
            imgs = linear_images(self.frame, phi)
            ok = True
            for xi, x in self._xi_pairs():
                sx = self._varsigma_xi(x)
                if substitute_generators(xi, imgs, antilinear=True) != sx:
                    ok = False
                    break
            if ok:
                return phi, sign
        raise InvolutionInconsistency("no pair-swap θ carries ξ^x to ξ^ς(x)")

    def _xi_pairs(self):
        m = self.model
        for i, xi in enumerate(self.xi_g):
            yield xi, ("g", m.g_basis.elements[i])
        for i, xi in enumerate(self.xi_s):
            yield xi, ("s", m.s_matrix(i))

    def _varsigma_xi(self, tagged):
        side, x = tagged
        if side == "g":
            return self.xi_of_g(self.model.cartan_involution(x))
        level, mat = x
        return self.xi_of_s(level, self.model.cartan_involution(mat))

    def xi_of_g(self, x) -> WeylElement:
        coeffs = _solve(self.model.g_basis.elements, x)
        return _combo(self.frame, self.xi_g, coeffs)

    def xi_of_s(self, level: int, x) -> WeylElement:
        m = self.model
        ids = [i for i, (lv, _) in enumerate(m.s_elements) if lv == level]
        elems = [m.s_matrix(i)[1] for i in ids]
        coeffs = _solve(elems, x)
        return _combo(self.frame, [self.xi_s[i] for i in ids], coeffs)

    def theta(self, D: WeylElement) -> WeylElement:
        return substitute_generators(D, self._theta_images, antilinear=True)

    def tau(self, D: WeylElement) -> WeylElement:
        return involution_tau(D)

    def act_lie(self, x_L, D: WeylElement) -> WeylElement:
        """Derivation extending ẑ_k -> hat(x·z_k) = -Σ_l X[k][l] ẑ_l."""
        return commutator(self.xi_of_matrix(x_L), D)

    def xi_of_matrix(self, x_L) -> WeylElement:
        from .model import hamiltonian
        return quantize_quadratic(self.frame, hamiltonian(self.model.registry, self.model.omega.matrix, x_L))

    def act_group(self, g_L, D: WeylElement) -> WeylElement:
        """Automorphism induced by the linear map g on L: ẑ -> hat(z ∘ g^{-1})."""
        from .linalg import mat_inv
        ginv = mat_inv([list(r) for r in g_L])
        # z_k ∘ g^{-1} = Σ_l ginv[k][l] z_l
        n = self.frame.n
        imgs = [WeylElement(self.frame, {_unit(n, l): ginv[k][l] for l in range(n) if ginv[k][l]})
                for k in range(n)]
        return substitute_generators(D, imgs)

    def verify(self) -> dict:
        """Build-time checks of the quantization and involution contracts."""
        m = self.model
        failures = []
        n = self.frame.n
        # [ẑ_k, ẑ_l] = Π_kl
        pi = m.omega.poisson
        for k in range(n):
            for l in range(n):
                if commutator(self.gens[k], self.gens[l]) != pi[k][l]:
                    failures.append(["ccr", k, l])
        for side, xis, mats, struct in (("g", self.xi_g, m.g_actions, m.g_structure),
                                        ("s", self.xi_s, m.s_actions, m.s_structure)):
            for i, xi in enumerate(xis):
                poly = (m.gamma_polys if side == "g" else m.sigma_polys)[i]
                if symbol(xi, 1) != poly:
                    failures.append(["symbol", side, i])
                if involution_tau(xi) != -xi:
                    failures.append(["tau", side, i])
                for k in range(n):
                    want = WeylElement(self.frame, {_unit(n, l): -mats[i][k][l] for l in range(n) if mats[i][k][l]})
                    if commutator(xi, self.gens[k]) != want:
                        failures.append(["action", side, i, k])
                for j, xj in enumerate(xis):
                    want = _combo(self.frame, xis, struct.get((i, j), {}))
                    if commutator(xi, xj) != want:
                        failures.append(["hom", side, i, j])
        for i, xg in enumerate(self.xi_g):
            for j, xs in enumerate(self.xi_s):
                if commutator(xg, xs):
                    failures.append(["commute", i, j])
        return {"check": "quantization", "failures": failures, "passed": not failures,
                "theta_sign": self.theta_sign}


def _solve(elements, x):
    try:
        coeffs = solve_in_basis(elements, x)
    except ValueError as exc:
        raise NotInSpan(str(exc)) from exc
    return {i: c for i, c in enumerate(coeffs) if c}


def _combo(frame, elems, coeffs: Mapping[int, object]) -> WeylElement:
    out = WeylElement(frame)
    for i, c in coeffs.items():
        out = out + elems[i].scale(c)
    return out


def xi(wm: WeylModel, x, side: str = "s", level: int | None = None) -> WeylElement:
    """ξ^x for a matrix x of g (side "g") or of the s-factor at ``level``."""
    if side == "g":
        return wm.xi_of_g(x)
    if level is None:
        levels = [lv for lv, b in wm.model.s_levels if len(b)]
        if len(levels) != 1:
            raise NotInSpan("level required when s has several factors")
        level = levels[0]
    return wm.xi_of_s(level, x)


def involution_theta(D: WeylElement, wm: WeylModel) -> WeylElement:
    return wm.theta(D)


def frame_from_model(model, swap: bool = False) -> WeylFrame:
    """Frame read off the Darboux basis of the model (every vector is a scaled coordinate)."""
    from .model import darboux_frame
    pairs, kappas = [], []
    pi = model.omega.poisson
    for qv, pv in darboux_frame(model):
        if len(qv) != 1 or len(pv) != 1:
            raise FrameMismatch("Darboux vectors are not coordinate functions")
        (q,), (p,) = qv, pv
        pairs.append((q, p))
        kappas.append(-pi[q][p])  # [p̂, q̂] = {p, q}
    frame = WeylFrame(model.registry, pairs, kappas)
    return frame.swapped() if swap else frame


def ordered_words(n: int, k: int):
    return combinations_with_replacement(range(n), k)


def filtration_dims(frame: WeylFrame, dmax) -> list[int]:
    """dim W_d for natural degrees 0..2·dmax, from products of generator words."""
    kmax = int(Fraction(dmax) * 2)
    ech = SparseEchelon()
    index: dict = {}
    dims = []
    gens = [WeylElement.gen(frame, k) for k in range(frame.n)]
    prev = {(): WeylElement.one(frame)}
    for k in range(kmax + 1):
        if k > 0:
            cur = {}
            for w, el in prev.items():
                last = w[-1] if w else 0
                for g in range(last, frame.n):
                    cur[w + (g,)] = weyl_mul(el, gens[g])
            prev = cur
        for el in prev.values():
            row = {}
            for e, c in el.terms.items():
                if e not in index:
                    index[e] = (-sum(e), len(index))
                row[index[e]] = c
            ech.add(row)
        dims.append(ech.rank)
    return dims
