"""Sparse commutative polynomials on the coordinates of a symplectic space.

Monomials are dense exponent tuples over a :class:`VariableRegistry`.  The
half-integer grading puts a monomial of natural degree ``k`` in ``P[k/2]``;
internally only natural degrees are used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .linalg import mat_inv
from .scalars import as_scalar, fmt_scalar

__all__ = [
    "VariableRegistry",
    "SparsePoly",
    "OmegaData",
    "RegistryMismatch",
    "DegreeMismatch",
    "natural_degree",
    "monomials_of_degree",
    "monomial_basis",
    "coords_of",
    "from_coords",
    "poisson_bracket",
    "fmt_half",
]

ZERO = Fraction(0)


class RegistryMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


def natural_degree(j) -> int:
    """Natural degree ``2j`` for a half-integer ``j`` (int, Fraction or "3/2")."""
    k = Fraction(j) * 2
    if k.denominator != 1 or k < 0:
        raise ValueError(f"{j!r} is not a nonnegative half-integer")
    return int(k)


def fmt_half(k: int) -> str:
    """Render natural degree k as the half-integer k/2."""
    return str(k // 2) if k % 2 == 0 else f"{k}/2"


@dataclass(frozen=True)
class VariableRegistry:
    names: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        object.__setattr__(self, "index", {n: i for i, n in enumerate(self.names)})

    def __len__(self):
        return len(self.names)

    def var(self, name_or_index) -> "SparsePoly":
        i = name_or_index if isinstance(name_or_index, int) else self.index[name_or_index]
        e = [0] * len(self.names)
        e[i] = 1
        return SparsePoly(self, {tuple(e): Fraction(1)})

    def one(self) -> "SparsePoly":
        return SparsePoly(self, {(0,) * len(self.names): Fraction(1)})

    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})


def _mono_text(reg: VariableRegistry, e: tuple) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(reg.names[i])
        elif k:
            parts.append(f"{reg.names[i]}^{k}")
    return "*".join(parts)


def mono_key(e: tuple):
    """Graded-lex sort key: higher degree first, then lexicographically larger first."""
    return (-sum(e), tuple(-x for x in e))


class SparsePoly:
    """Immutable sparse polynomial with exact coefficients."""

    __slots__ = ("registry", "terms")

    def __init__(self, registry: VariableRegistry, terms: Mapping[tuple, object] | None = None):
        self.registry = registry
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, registry, c) -> "SparsePoly":
        return cls(registry, {(0,) * len(registry): as_scalar(c)})

    def _check(self, other: "SparsePoly"):
        if other.registry is not self.registry and other.registry != self.registry:
            raise RegistryMismatch("polynomials live on different registries")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.registry, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, ZERO) + c
        return SparsePoly(self.registry, t)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.registry, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, SparsePoly) else -as_scalar(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "SparsePoly":
        return SparsePoly(self.registry, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            return self.scale(as_scalar(other))
        self._check(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, ZERO) + c1 * c2
        return SparsePoly(self.registry, t)

    def __rmul__(self, other):
        return self.scale(as_scalar(other))

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.registry == other.registry and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Natural (total) degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (k is None or degs == {k})

    def derivative(self, i: int) -> "SparsePoly":
        t: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                f = list(e)
                f[i] = k - 1
                f = tuple(f)
                t[f] = t.get(f, ZERO) + c * k
        return SparsePoly(self.registry, t)

    def substitute_linear(self, m: Sequence[Sequence]) -> "SparsePoly":
        """Compose with the linear map on points: f(M x), M given as a dense matrix."""
        reg = self.registry
        images = []
        for i in range(len(reg)):
            images.append(SparsePoly(reg, {_unit(len(reg), j): as_scalar(m[i][j]) for j in range(len(reg)) if m[i][j]}))
        out = reg.zero()
        for e, c in self.terms.items():
            term = SparsePoly.constant(reg, c)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * images[i]
            out = out + term
        return out

    def evaluate(self, point: Sequence):
        total = ZERO
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total = total + v
        return total

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]))

    def to_text(self) -> str:
        """Canonical text form with deterministic graded-lex monomial order."""
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = _mono_text(self.registry, e)
            cs = fmt_scalar(c)
            if not mono:
                piece = cs
            elif cs == "1":
                piece = mono
            elif cs == "-1":
                piece = "-" + mono
            else:
                piece = f"({cs})*{mono}" if ("+" in cs[1:] or "-" in cs[1:]) else f"{cs}*{mono}"
            out.append(piece)
        text = " + ".join(out)
        return text.replace("+ -", "- ")

    def __repr__(self):
        return f"SparsePoly({self.to_text()})"


def _unit(n: int, i: int) -> tuple:
    e = [0] * n
    e[i] = 1
    return tuple(e)


@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, k: int) -> tuple[tuple, ...]:
    """All exponent tuples of total degree k, in graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), k):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=mono_key)
    return tuple(out)


def monomial_basis(registry: VariableRegistry, j) -> list[SparsePoly]:
    k = natural_degree(j)
    return [SparsePoly(registry, {e: Fraction(1)}) for e in monomials_of_degree(len(registry), k)]


def coords_of(f: SparsePoly, basis: Sequence[SparsePoly]) -> list:
    """Coefficient vector of ``f`` in a monomial basis."""
    pos = {}
    k = None
    for i, b in enumerate(basis):
        (e,) = b.terms
        pos[e] = i
        k = sum(e)
    vec = [ZERO] * len(basis)
    for e, c in f.terms.items():
        if e not in pos:
            raise DegreeMismatch(f"monomial of degree {sum(e)} outside a degree-{k} basis")
        vec[pos[e]] = c
    return vec


def from_coords(vec: Sequence, basis: Sequence[SparsePoly]) -> SparsePoly:
    reg = basis[0].registry
    t = {}
    for c, b in zip(vec, basis):
        if c:
            (e,) = b.terms
            t[e] = c
    return SparsePoly(reg, t)


class OmegaData:
    """Symplectic form on L and its inverse, the Poisson tensor on L*.

    ``matrix[k][l] = Ω(e_k, e_l)`` on the coordinate basis of L.  The bracket
    of coordinate functions is ``{z_k, z_l} = poisson[k][l]`` with
    ``poisson = Ω^{-1}``.
    """

    def __init__(self, registry: VariableRegistry, matrix: Sequence[Sequence]):
        n = len(registry)
        m = [[as_scalar(x) for x in row] for row in matrix]
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("Ω must be square on the registry")
        for i in range(n):
            for j in range(n):
                if m[i][j] != -m[j][i]:
                    raise ValueError("Ω is not antisymmetric")
        self.registry = registry
        self.matrix = m
        self.poisson = mat_inv(m)
        self._pairs = [
            [(l, self.poisson[k][l]) for l in range(n) if self.poisson[k][l]] for k in range(n)
        ]

    def bracket_pairs(self):
        """Nonzero entries ``(k, l, {z_k, z_l})`` of the Poisson tensor."""
        for k, row in enumerate(self._pairs):
            for l, v in row:
                yield k, l, v


def poisson_bracket(f: SparsePoly, g: SparsePoly, omega: OmegaData) -> SparsePoly:
    """{f, g} = Σ_kl {z_k, z_l} ∂_k f ∂_l g."""
    if f.registry != omega.registry or g.registry != omega.registry:
        raise RegistryMismatch("bracket operands must share the Ω registry")
    reg = omega.registry
    if not f.terms or not g.terms:
        return reg.zero()
    n = len(reg)
    df = [f.derivative(k) if any(e[k] for e in f.terms) else None for k in range(n)]
    dg = [g.derivative(k) if any(e[k] for e in g.terms) else None for k in range(n)]
    out: dict = {}
    for k, l, v in omega.bracket_pairs():
        a, b = df[k], dg[l]
        if a is None or b is None or not a.terms or not b.terms:
            continue
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, ZERO) + v * c1 * c2
    return SparsePoly(reg, out)
