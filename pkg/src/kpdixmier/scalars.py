"""Exact scalars: rationals and Gaussian rationals.

Rational values are plain :class:`fractions.Fraction` objects.  A value with a
nonzero imaginary part is a :class:`QI`; arithmetic that cancels the imaginary
part collapses back to ``Fraction`` so that rational pipelines stay fast.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["QI", "I", "as_scalar", "conj", "real", "imag", "fmt_scalar", "parse_scalar"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _make(re: Fraction, im: Fraction):
    if im == 0:
        return re
    return QI(re, im)


class QI:
    """A Gaussian rational ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @staticmethod
    def _parts(x):
        if isinstance(x, QI):
            return x.re, x.im
        if isinstance(x, (int, Rational)):
            return _frac(x), Fraction(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return _make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return _make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return _make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        if d == 0:
            return _make(a * c, b * c)
        return _make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        if d == 0:
            return _make(self.re / c, self.im / c)
        n = c * c + d * d
        return _make((self.re * c + self.im * d) / n, (self.im * c - self.re * d) / n)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QI(*p) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return _make(self.re, -self.im)

    def __repr__(self):
        return f"QI({fmt_scalar(self)})"

    def __str__(self):
        return fmt_scalar(self)


I = QI(0, 1)


def as_scalar(x):
    """Coerce ints, Fractions, QI values and their string forms to an exact scalar."""
    if isinstance(x, QI):
        return _make(x.re, x.im)
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    return _frac(x)


def conj(x):
    if isinstance(x, QI):
        return x.conjugate()
    return x


def real(x) -> Fraction:
    return x.re if isinstance(x, QI) else _frac(x)


def imag(x) -> Fraction:
    return x.im if isinstance(x, QI) else Fraction(0)


def _fmt_q(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_scalar(x) -> str:
    """Render as ``"3/4"``, ``"-2"``, ``"1/2+1/3i"`` or ``"-i"``."""
    re, im = real(x), imag(x)
    if im == 0:
        return _fmt_q(re)
    if abs(im) == 1:
        ims = "i" if im > 0 else "-i"
    else:
        ims = _fmt_q(im) + "i"
    if re == 0:
        return ims
    sign = "" if ims.startswith("-") else "+"
    return f"{_fmt_q(re)}{sign}{ims}"


def parse_scalar(text: str):
    s = text.strip().replace(" ", "")
    if not s.endswith("i"):
        return Fraction(s)
    body = s[:-1]
    # split at the last sign that is not the leading one and not inside an exponent
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut <= 0:
        re_txt, im_txt = "0", body
    else:
        re_txt, im_txt = body[:cut], body[cut:]
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    return _make(Fraction(re_txt), Fraction(im_txt))
