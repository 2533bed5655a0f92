"""Sparse multivariate polynomials over Q(i).

A polynomial is a mapping ``exponent tuple -> coefficient`` over an ordered
tuple of indeterminate names.  The low-level helpers (``p_add``, ``p_mul``,
...) work on bare dicts and are shared with the Groebner engine; the
:class:`MultiPoly` wrapper adds names, an order tag and operator syntax.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .gaussian import coerce, format_coeff, GaussianRational

__all__ = [
    "MultiPoly",
    "order_key",
    "p_add",
    "p_sub",
    "p_mul",
    "p_scale",
    "p_mul_term",
    "p_gcd",
    "p_exquo",
    "p_monic",
    "p_leading",
]

Exp = tuple
PolyDict = dict

# ---------------------------------------------------------------------------
# monomial orders


def _grevlex(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def _grlex(e):
    return (sum(e), e)


def _lex(e):
    return e


@lru_cache(maxsize=None)
def order_key(order: str) -> Callable[[Exp], tuple]:
    """Sort key realizing a monomial order; larger key means larger monomial.

    ``elim:k`` is the block order eliminating the first ``k`` indeterminates
    (grevlex inside each block).
    """
    if order == "grevlex":
        return _grevlex
    if order == "lex":
        return _lex
    if order == "grlex":
        return _grlex
    if order.startswith("elim:"):
        k = int(order[5:])

        def key(e, k=k):
            return (_grevlex(e[:k]), _grevlex(e[k:]))

        return key
    raise ValueError(f"unknown monomial order {order!r}")


# ---------------------------------------------------------------------------
# dict-level arithmetic


def p_add(p: PolyDict, q: PolyDict) -> PolyDict:
    if len(p) < len(q):
        p, q = q, p
    r = dict(p)
    for m, c in q.items():
        s = r.get(m)
        if s is None:
            r[m] = c
        else:
            s = s + c
            if s:
                r[m] = s
            else:
                del r[m]
    return r


def p_sub(p: PolyDict, q: PolyDict) -> PolyDict:
    r = dict(p)
    for m, c in q.items():
        s = r.get(m)
        if s is None:
            r[m] = -c
        else:
            s = s - c
            if s:
                r[m] = s
            else:
                del r[m]
    return r


def p_scale(p: PolyDict, c) -> PolyDict:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def p_mul_term(p: PolyDict, mono: Exp, c) -> PolyDict:
    return {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in p.items()}


def p_mul(p: PolyDict, q: PolyDict) -> PolyDict:
    if len(p) > len(q):
        p, q = q, p
    r: PolyDict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            s = r.get(m)
            v = c1 * c2
            if s is None:
                r[m] = v
            else:
                s = s + v
                if s:
                    r[m] = s
                else:
                    del r[m]
    return r


def p_pow(p: PolyDict, e: int, nvars: int) -> PolyDict:
    result = {(0,) * nvars: mpq(1)}
    base = p
    while e:
        if e & 1:
            result = p_mul(result, base)
        e >>= 1
        if e:
            base = p_mul(base, base)
    return result


def p_leading(p: PolyDict, key) -> tuple:
    m = max(p, key=key)
    return m, p[m]


def p_monic(p: PolyDict, key=_grevlex) -> PolyDict:
    if not p:
        return p
    _, c = p_leading(p, key)
    if c == 1:
        return p
    inv = 1 / c
    return {m: v * inv for m, v in p.items()}


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def p_exquo(p: PolyDict, q: PolyDict) -> PolyDict:
    """Exact quotient ``p / q``; raises ``ArithmeticError`` if ``q`` does not divide ``p``."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    mq, cq = p_leading(q, _lex)
    inv = 1 / cq
    quo: PolyDict = {}
    r = dict(p)
    while r:
        mr, cr = p_leading(r, _lex)
        if not _divides(mq, mr):
            raise ArithmeticError("inexact polynomial division")
        m = tuple(a - b for a, b in zip(mr, mq))
        c = cr * inv
        quo[m] = c
        r = p_sub(r, p_mul_term(q, m, c))
    return quo


# -- gcd over Q(i)[x_1..x_n] by recursive primitive remainder sequences --------


def _deg_in(p: PolyDict, v: int) -> int:
    return max((m[v] for m in p), default=-1)


def _coeffs_in(p: PolyDict, v: int) -> dict:
    out: dict = {}
    for m, c in p.items():
        d = m[v]
        mm = m[:v] + (0,) + m[v + 1:]
        out.setdefault(d, {})[mm] = c
    return out


def _content_in(p: PolyDict, v: int) -> PolyDict:
    g: PolyDict = {}
    for c in _coeffs_in(p, v).values():
        g = p_gcd(g, c)
        if len(g) == 1 and not any(next(iter(g))):
            break
    return g


def _prem(a: PolyDict, b: PolyDict, v: int) -> PolyDict:
    db = _deg_in(b, v)
    bc = _coeffs_in(b, v)
    lcb = bc[db]
    r = a
    while r:
        dr = _deg_in(r, v)
        if dr < db:
            break
        lcr = _coeffs_in(r, v)[dr]
        shift = tuple(dr - db if i == v else 0 for i in range(len(next(iter(b)))))
        r = p_sub(p_mul(r, lcb), p_mul(p_mul_term(lcr, shift, mpq(1)), b))
    return r


def _is_const(p: PolyDict) -> bool:
    return len(p) == 1 and not any(next(iter(p)))


def p_gcd(f: PolyDict, g: PolyDict) -> PolyDict:
    """Monic (grevlex) greatest common divisor; ``gcd(0, 0) = 0``."""
    if not f:
        return p_monic(g)
    if not g:
        return p_monic(f)
    if _is_const(f) or _is_const(g):
        nv = len(next(iter(f)))
        return {(0,) * nv: mpq(1)}
    if f == g:
        return p_monic(f)
    nv = len(next(iter(f)))
    used = [i for i in range(nv) if any(m[i] for m in f) or any(m[i] for m in g)]
    v = used[0]
    df, dg = _deg_in(f, v), _deg_in(g, v)
    if df == 0:
        return p_gcd(f, _content_in(g, v))
    if dg == 0:
        return p_gcd(_content_in(f, v), g)
    cf, cg = _content_in(f, v), _content_in(g, v)
    c = p_gcd(cf, cg)
    a, b = p_exquo(f, cf), p_exquo(g, cg)
    if df < dg:
        a, b = b, a
    while b:
        r = _prem(a, b, v)
        a = b
        if not r:
            break
        if _deg_in(r, v) == 0:
            a = {}
            break
        b = p_exquo(r, _content_in(r, v))
    if not a:
        return p_monic(c)
    a = p_exquo(a, _content_in(a, v))
    return p_monic(p_mul(c, a))


# ---------------------------------------------------------------------------


class MultiPoly:
    """Immutable polynomial with named indeterminates.

    ``terms`` lists ``(exponent, coefficient)`` pairs sorted decreasingly in
    the declared order; the backing dict is available as ``dict``.
    """

    __slots__ = ("gens", "dict", "order", "_hash")

    def __init__(self, gens: Iterable[str], terms: Mapping | Iterable = (), order: str = "grevlex"):
        self.gens = tuple(gens)
        items = terms.items() if isinstance(terms, Mapping) else terms
        d: PolyDict = {}
        n = len(self.gens)
        for m, c in items:
            m = tuple(m)
            if len(m) != n:
                raise ValueError("exponent length does not match indeterminates")
            c = coerce(c)
            if c:
                s = d.get(m)
                s = c if s is None else s + c
                if s:
                    d[m] = s
                else:
                    d.pop(m, None)
        self.dict = d
        self.order = order
        self._hash = None

    @classmethod
    def _raw(cls, gens: tuple, d: PolyDict, order: str = "grevlex") -> "MultiPoly":
        self = object.__new__(cls)
        self.gens = gens
        self.dict = d
        self.order = order
        self._hash = None
        return self

    @classmethod
    def constant(cls, c, gens: Iterable[str] = (), order: str = "grevlex") -> "MultiPoly":
        gens = tuple(gens)
        c = coerce(c)
        return cls._raw(gens, {(0,) * len(gens): c} if c else {}, order)

    @classmethod
    def var(cls, name: str, gens: Iterable[str] | None = None, order: str = "grevlex") -> "MultiPoly":
        gens = (name,) if gens is None else tuple(gens)
        e = tuple(1 if g == name else 0 for g in gens)
        return cls._raw(gens, {e: mpq(1)}, order)

    # -- structure ------------------------------------------------------------
    @property
    def terms(self) -> list:
        key = order_key(self.order)
        return sorted(self.dict.items(), key=lambda t: key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self.dict

    def __bool__(self) -> bool:
        return bool(self.dict)

    def is_constant(self) -> bool:
        return not self.dict or _is_const(self.dict)

    def constant_value(self):
        if not self.dict:
            return mpq(0)
        if not _is_const(self.dict):
            raise ValueError("polynomial is not constant")
        return next(iter(self.dict.values()))

    def leading(self) -> tuple:
        return p_leading(self.dict, order_key(self.order))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.dict), default=-1)

    def degree(self, name: str) -> int:
        if name not in self.gens:
            return 0 if self.dict else -1
        return _deg_in(self.dict, self.gens.index(name))

    def variables(self) -> tuple:
        return tuple(g for i, g in enumerate(self.gens) if any(m[i] for m in self.dict))

    def with_gens(self, gens: Iterable[str], order: str | None = None) -> "MultiPoly":
        """Re-embed into a different (super- or sub-) set of indeterminates."""
        gens = tuple(gens)
        order = self.order if order is None else order
        if gens == self.gens:
            return self if order == self.order else MultiPoly._raw(gens, self.dict, order)
        pos = {g: i for i, g in enumerate(gens)}
        idx = []
        for i, g in enumerate(self.gens):
            if g in pos:
                idx.append((i, pos[g]))
            elif any(m[i] for m in self.dict):
                raise ValueError(f"indeterminate {g!r} occurs but is not in target gens")
        d = {}
        n = len(gens)
        for m, c in self.dict.items():
            e = [0] * n
            for i, j in idx:
                e[j] = m[i]
            d[tuple(e)] = c
        return MultiPoly._raw(gens, d, order)

    def _align(self, other: "MultiPoly"):
        if self.gens == other.gens:
            return self, other
        gens = tuple(sorted(set(self.gens) | set(other.gens)))
        return self.with_gens(gens), other.with_gens(gens)

    def _wrap(self, other):
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(other, self.gens, self.order)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        a, b = self._align(self._wrap(other))
        return MultiPoly._raw(a.gens, p_add(a.dict, b.dict), self.order)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._align(self._wrap(other))
        return MultiPoly._raw(a.gens, p_sub(a.dict, b.dict), self.order)

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __neg__(self):
        return MultiPoly._raw(self.gens, {m: -c for m, c in self.dict.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly._raw(self.gens, p_scale(self.dict, coerce(other)), self.order)
        a, b = self._align(other)
        return MultiPoly._raw(a.gens, p_mul(a.dict, b.dict), self.order)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        return MultiPoly._raw(self.gens, p_pow(self.dict, e, len(self.gens)), self.order)

    def exquo(self, other: "MultiPoly") -> "MultiPoly":
        a, b = self._align(other)
        return MultiPoly._raw(a.gens, p_exquo(a.dict, b.dict), self.order)

    def gcd(self, other: "MultiPoly") -> "MultiPoly":
        a, b = self._align(other)
        return MultiPoly._raw(a.gens, p_gcd(a.dict, b.dict), self.order)

    def monic(self) -> "MultiPoly":
        return MultiPoly._raw(self.gens, p_monic(self.dict, order_key(self.order)), self.order)

    def diff(self, name: str) -> "MultiPoly":
        if name not in self.gens:
            return MultiPoly._raw(self.gens, {}, self.order)
        v = self.gens.index(name)
        d = {}
        for m, c in self.dict.items():
            if m[v]:
                d[m[:v] + (m[v] - 1,) + m[v + 1:]] = c * m[v]
        return MultiPoly._raw(self.gens, d, self.order)

    def eval(self, values: Mapping[str, object]):
        """Evaluate at coefficient values for every indeterminate that occurs."""
        total = mpq(0)
        vals = [coerce(values[g]) if g in values else None for g in self.gens]
        for m, c in self.dict.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    if v is None:
                        raise KeyError("missing value for an indeterminate")
                    t = t * v ** e
            total = total + t
        return total

    # -- comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if self.gens == other.gens:
                return self.dict == other.dict
            a, b = self._align(other)
            return a.dict == b.dict
        try:
            c = coerce(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            v = self.variables()
            p = self.with_gens(v) if v != self.gens else self
            self._hash = hash((v, frozenset(p.dict.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        return format_poly(self.gens, self.terms)


def _mono_str(gens, m) -> str:
    parts = []
    for g, e in zip(gens, m):
        if e == 1:
            parts.append(g)
        elif e:
            parts.append(f"{g}^{e}")
    return "*".join(parts)


def format_poly(gens, terms) -> str:
    """Render terms in the literal grammar (``^`` powers, explicit ``*``)."""
    if not terms:
        return "0"
    out = []
    for k, (m, c) in enumerate(terms):
        mono = _mono_str(gens, m)
        complex_c = isinstance(c, GaussianRational) and c.re
        if mono:
            if complex_c:
                s = f"({format_coeff(c)})*{mono}"
            elif c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{format_coeff(c)}*{mono}"
        else:
            s = f"({format_coeff(c)})" if complex_c and len(terms) > 1 else format_coeff(c)
        if k and not s.startswith("-"):
            out.append("+" + s)
        else:
            out.append(s)
    return "".join(out)
