"""Gaussian rationals: exact elements of Q(i).

Real values are represented by plain ``gmpy2.mpq`` objects; only values with a
nonzero imaginary part become :class:`GaussianRational` instances.  Every
arithmetic result is normalized back to that canonical split, so two equal
field elements always have the same Python type and compare equal.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

__all__ = ["GaussianRational", "coerce", "real_part", "imag_part", "is_coefficient", "format_coeff", "I", "ZERO", "ONE"]

_REAL_TYPES = (int, type(mpq(0)), Fraction)
_MPQ = type(mpq(0))


def _q(x) -> mpq:
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(x.numerator, x.denominator) if not isinstance(x, int) else mpq(x)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class GaussianRational:
    """``re + im*i`` with rational parts and ``im != 0``.

    Constructing one with a zero imaginary part returns an ``mpq`` instead.
    """

    __slots__ = ("re", "im")

    def __new__(cls, re=0, im=0):
        re, im = _q(re), _q(im)
        if not im:
            return re
        self = object.__new__(cls)
        self.re = re
        self.im = im
        return self

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, _REAL_TYPES):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re - other.re, self.im - other.im)
        if isinstance(other, _REAL_TYPES):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _REAL_TYPES):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re * other.re - self.im * other.im,
                                    self.re * other.im + self.im * other.re)
        if isinstance(other, _REAL_TYPES):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        if isinstance(other, _REAL_TYPES):
            if not other:
                raise ZeroDivisionError("division by zero in Q(i)")
            return GaussianRational(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _REAL_TYPES):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = mpq(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    # comparison / hashing --------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_coeff(self)


I = GaussianRational(0, 1)
ZERO = mpq(0)
ONE = mpq(1)


def coerce(x):
    """Convert ints, Fractions, strings and ``complex`` with integral parts into the canonical coefficient form."""
    if isinstance(x, (GaussianRational, _MPQ)):
        return x
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise TypeError("only complex numbers with integral parts are exact")
        return GaussianRational(int(x.real), int(x.imag))
    if isinstance(x, tuple) and len(x) == 2:
        return GaussianRational(*x)
    return _q(x)


def real_part(x) -> mpq:
    return x.re if isinstance(x, GaussianRational) else x


def imag_part(x) -> mpq:
    return x.im if isinstance(x, GaussianRational) else mpq(0)


def is_coefficient(x) -> bool:
    return isinstance(x, (GaussianRational, _MPQ))


def _fmt_q(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_coeff(x) -> str:
    """Literal text of a coefficient, e.g. ``-3/2`` or ``1/2+3*i``."""
    if not isinstance(x, GaussianRational):
        return _fmt_q(x)
    re, im = x.re, x.im
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = _fmt_q(im) + "*i"
    if not re:
        return ims
    if ims.startswith("-"):
        return f"{_fmt_q(re)}{ims}"
    return f"{_fmt_q(re)}+{ims}"


def gaussian_sqrt(x):
    """Exact square root in Q(i), or ``None`` when ``x`` is not a square there."""
    re, im = real_part(x), imag_part(x)
    if not im:
        if re >= 0:
            r = _rat_sqrt(re)
            return r
        r = _rat_sqrt(-re)
        return None if r is None else GaussianRational(0, r)
    # (u + v i)^2 = re + im i  ->  u^2 = (re + |x|)/2
    norm = _rat_sqrt(re * re + im * im)
    if norm is None:
        return None
    u = _rat_sqrt((re + norm) / 2)
    if u is None or not u:
        return None
    v = im / (2 * u)
    return GaussianRational(u, v)


def _rat_sqrt(q):
    if q < 0:
        return None
    n, d = gmpy2.isqrt_rem(q.numerator), gmpy2.isqrt_rem(q.denominator)
    if n[1] or d[1]:
        return None
    return mpq(n[0], d[0])
