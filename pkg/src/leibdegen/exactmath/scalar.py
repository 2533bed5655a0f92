"""Rational functions over Q(i) in named parameters, plus the literal parser."""

from __future__ import annotations

import re
from typing import Callable, Mapping

from gmpy2 import mpq

from .gaussian import GaussianRational, I as _I, coerce
from .poly import MultiPoly, format_poly, p_exquo, p_gcd, p_monic, p_mul, p_add, p_sub, p_scale, _grevlex

__all__ = ["Scalar", "S", "ExceptionalValueError", "ScalarParseError", "parse_scalar", "parse_expression"]


class ExceptionalValueError(ArithmeticError):
    """A specialization made a denominator vanish identically."""

    def __init__(self, denominator: "MultiPoly", bindings: Mapping | None = None):
        self.denominator = denominator
        self.bindings = dict(bindings or {})
        where = ", ".join(f"{k}={v}" for k, v in self.bindings.items())
        super().__init__(f"denominator {denominator} vanishes at {where or 'the given values'}")


class ScalarParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int, line: int | None = None):
        self.pos = pos
        self.line = line
        self.column = pos + 1
        loc = f"line {line}, column {pos + 1}" if line is not None else f"column {pos + 1}"
        super().__init__(f"{message} at {loc}: {text!r}")


def _shrink(gens: tuple, num: dict, den: dict):
    used = [i for i in range(len(gens)) if any(m[i] for m in num) or any(m[i] for m in den)]
    if len(used) == len(gens):
        return gens, num, den
    ng = tuple(gens[i] for i in used)
    num = {tuple(m[i] for i in used): c for m, c in num.items()}
    den = {tuple(m[i] for i in used): c for m, c in den.items()}
    return ng, num, den


def _embed(src: tuple, dst: tuple, d: dict) -> dict:
    if src == dst:
        return d
    pos = [dst.index(g) for g in src]
    n = len(dst)
    out = {}
    for m, c in d.items():
        e = [0] * n
        for i, j in enumerate(pos):
            e[j] = m[i]
        out[tuple(e)] = c
    return out


class Scalar:
    """Canonical reduced fraction ``num/den`` of polynomials over Q(i).

    Invariants: ``gcd(num, den) = 1``, ``den`` monic under grevlex, and
    ``gens`` is the sorted tuple of indeterminates that actually occur, so
    equality is structural.
    """

    __slots__ = ("gens", "_num", "_den", "_hash")

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self.gens, self._num, self._den = value.gens, value._num, value._den
        else:
            c = coerce(value)
            self.gens = ()
            self._num = {(): c} if c else {}
            self._den = {(): mpq(1)}
        self._hash = None

    @classmethod
    def _raw(cls, gens, num, den) -> "Scalar":
        self = object.__new__(cls)
        self.gens = gens
        self._num = num
        self._den = den
        self._hash = None
        return self

    @classmethod
    def _make(cls, gens: tuple, num: dict, den: dict) -> "Scalar":
        if not den:
            raise ZeroDivisionError("division by the zero Scalar")
        if not num:
            return ZERO
        nv = len(gens)
        if nv:
            den_const = len(den) == 1 and not any(next(iter(den)))
            if not den_const:
                g = p_gcd(num, den)
                if not (len(g) == 1 and not any(next(iter(g)))):
                    num = p_exquo(num, g)
                    den = p_exquo(den, g)
            lm = max(den, key=_grevlex)
            lc = den[lm]
            if lc != 1:
                inv = 1 / lc
                num = p_scale(num, inv)
                den = p_scale(den, inv)
            gens, num, den = _shrink(gens, num, den)
            return cls._raw(gens, num, den)
        c = num[()] / den[()]
        return cls._raw((), {(): c}, {(): mpq(1)})

    @classmethod
    def var(cls, name: str) -> "Scalar":
        return cls._raw((name,), {(1,): mpq(1)}, {(0,): mpq(1)})

    @classmethod
    def from_polys(cls, num: MultiPoly, den: MultiPoly | None = None) -> "Scalar":
        if den is None:
            den = MultiPoly.constant(1, num.gens)
        gens = tuple(sorted(set(num.gens) | set(den.gens)))
        return cls._make(gens, num.with_gens(gens).dict, den.with_gens(gens).dict)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        return parse_scalar(text)

    # -- accessors ---------------------------------------------------------------
    @property
    def numerator(self) -> MultiPoly:
        return MultiPoly._raw(self.gens, self._num)

    @property
    def denominator(self) -> MultiPoly:
        return MultiPoly._raw(self.gens, self._den)

    def variables(self) -> tuple:
        return self.gens

    def is_zero(self) -> bool:
        return not self._num

    def __bool__(self) -> bool:
        return bool(self._num)

    def is_constant(self) -> bool:
        return not self.gens

    def is_polynomial(self) -> bool:
        return len(self._den) == 1 and not any(next(iter(self._den)))

    @property
    def value(self):
        """Coefficient value of a constant Scalar."""
        if self.gens:
            raise ValueError(f"{self} is not constant")
        return self._num.get((), mpq(0))

    # -- arithmetic ----------------------------------------------------------------
    def _pair(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(other)
        if self.gens == other.gens:
            return self.gens, self._num, self._den, other._num, other._den
        gens = tuple(sorted(set(self.gens) | set(other.gens)))
        return (gens, _embed(self.gens, gens, self._num), _embed(self.gens, gens, self._den),
                _embed(other.gens, gens, other._num), _embed(other.gens, gens, other._den))

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        if not other._num:
            return self
        if not self._num:
            return other
        if not self.gens and not other.gens:
            return Scalar(self._num[()] + other._num[()])
        gens, n1, d1, n2, d2 = self._pair(other)
        if d1 == d2:
            num = p_add(n1, n2)
            den = d1
        else:
            num = p_add(p_mul(n1, d2), p_mul(n2, d1))
            den = p_mul(d1, d2)
        return Scalar._make(gens, num, den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.gens, {m: -c for m, c in self._num.items()}, self._den)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        if not self._num or not other._num:
            return ZERO
        if not self.gens:
            c = self._num[()]
            if c == 1:
                return other
            if not other.gens:
                return Scalar(c * other._num[()])
            return Scalar._raw(other.gens, p_scale(other._num, c), other._den)
        if not other.gens:
            c = other._num[()]
            if c == 1:
                return self
            return Scalar._raw(self.gens, p_scale(self._num, c), self._den)
        gens, n1, d1, n2, d2 = self._pair(other)
        return Scalar._make(gens, p_mul(n1, n2), p_mul(d1, d2))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self._num:
            raise ZeroDivisionError("division by the zero Scalar")
        if not self.gens:
            return Scalar(1 / self._num[()])
        return Scalar._make(self.gens, dict(self._den), dict(self._num))

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar(other)
            except TypeError:
                return NotImplemented
        if not other._num:
            raise ZeroDivisionError("division by the zero Scalar")
        if not other.gens:
            c = other._num[()]
            if not self.gens:
                return Scalar(self._num.get((), mpq(0)) / c)
            return Scalar._raw(self.gens, p_scale(self._num, 1 / c), self._den)
        gens, n1, d1, n2, d2 = self._pair(other)
        return Scalar._make(gens, p_mul(n1, d2), p_mul(d1, n2))

    def __rtruediv__(self, other):
        return Scalar(other) / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- specialization --------------------------------------------------------------
    def substitute(self, bindings: Mapping[str, object]) -> "Scalar":
        """Simultaneously replace indeterminates by Scalars.

        Raises :class:`ExceptionalValueError` when the denominator becomes zero.
        """
        if not self.gens or not any(g in bindings for g in self.gens):
            return self
        vals = [(_as_scalar(bindings[g]) if g in bindings else Scalar.var(g)) for g in self.gens]
        den = _eval_dict(self._den, vals)
        if not den:
            raise ExceptionalValueError(self.denominator, {g: bindings[g] for g in self.gens if g in bindings})
        return _eval_dict(self._num, vals) / den

    def at(self, **values) -> "Scalar":
        return self.substitute(values)

    def diff(self, name: str) -> "Scalar":
        if name not in self.gens:
            return ZERO
        n, d = self.numerator, self.denominator
        return Scalar.from_polys(n.diff(name) * d - n * d.diff(name), d * d)

    # -- comparison ---------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.gens == other.gens and self._num == other._num and self._den == other._den
        try:
            c = coerce(other)
        except TypeError:
            return NotImplemented
        return not self.gens and self._num.get((), mpq(0)) == c

    def __hash__(self):
        if self._hash is None:
            if not self.gens:
                self._hash = hash(self._num.get((), 0))
            else:
                self._hash = hash((self.gens, frozenset(self._num.items()), frozenset(self._den.items())))
        return self._hash

    def __repr__(self):
        return f"Scalar('{self}')"

    def __str__(self):
        num = self.numerator
        nterms = num.terms
        ns = format_poly(self.gens, nterms)
        if self.is_polynomial():
            return ns
        dterms = self.denominator.terms
        ds = format_poly(self.gens, dterms)
        if len(nterms) > 1 or isinstance(nterms[0][1], GaussianRational) or (
                not any(nterms[0][0]) and nterms[0][1].denominator != 1):
            ns = f"({ns})"
        single_var = len(dterms) == 1 and dterms[0][1] == 1 and sum(dterms[0][0]) == 1
        if not single_var:
            ds = f"({ds})"
        return f"{ns}/{ds}"


def _eval_dict(d: dict, vals: list) -> Scalar:
    total = ZERO
    cache: dict = {}
    for m, c in d.items():
        t = Scalar(c)
        for i, e in enumerate(m):
            if e:
                key = (i, e)
                p = cache.get(key)
                if p is None:
                    p = cache[key] = vals[i] ** e
                t = t * p
        total = total + t
    return total


def _as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    return Scalar(x)


def S(x) -> Scalar:
    """Coerce ints, fractions, coefficients or literal strings to a Scalar."""
    return _as_scalar(x)


ZERO = Scalar._raw((), {}, {(): mpq(1)})
ONE = Scalar._raw((), {(): mpq(1)}, {(): mpq(1)})
Scalar.ZERO = ZERO
Scalar.ONE = ONE
Scalar.I = Scalar._raw((), {(): _I}, {(): mpq(1)})


# ---------------------------------------------------------------------------
# literal grammar: integers, p/q, i, names, + - * / ( ) ^, juxtaposition = *

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(.))")


def _tokenize(text: str, line: int | None):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ScalarParseError(f"unexpected character {ch!r}", text, m.start(3), line)
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, atom: Callable[[str], object], line: int | None):
        self.text = text
        self.toks = _tokenize(text, line)
        self.k = 0
        self.atom_fn = atom
        self.line = line

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ScalarParseError(msg, self.text, tok[2], self.line)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        v = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def _starts_atom(self, tok):
        return tok[0] in ("num", "name") or tok[:2] == ("op", "(")

    def term(self):
        v = self.factor()
        while True:
            tok = self.peek()
            if tok[:2] == ("op", "*"):
                self.take()
                v = v * self.factor()
            elif tok[:2] == ("op", "/"):
                self.take()
                d = self.factor()
                try:
                    v = v / d
                except ZeroDivisionError:
                    self.error("division by zero", tok)
            elif self._starts_atom(tok):
                v = v * self.factor()
            else:
                return v

    def factor(self):
        tok = self.peek()
        if tok[:2] == ("op", "-"):
            self.take()
            return -self.factor()
        if tok[:2] == ("op", "+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.error("exponent must be a nonnegative integer", tok)
            return base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        if tok[0] == "num":
            return Scalar(int(tok[1]))
        if tok[0] == "name":
            if tok[1] == "i":
                return Scalar.I
            try:
                return self.atom_fn(tok[1])
            except KeyError:
                self.error(f"undeclared name {tok[1]!r}", tok)
        if tok[:2] == ("op", "("):
            v = self.expr()
            if self.take()[:2] != ("op", ")"):
                self.error("expected ')'", self.toks[self.k - 1])
            return v
        self.error(f"unexpected token {tok[1]!r}", tok)


def parse_expression(text: str, atom: Callable[[str], object] | None = None, line: int | None = None):
    """Parse ``text``; names are resolved by ``atom`` (default: free indeterminates)."""
    return _Parser(text, atom or Scalar.var, line).parse()


def parse_scalar(text: str, allowed: set | None = None, line: int | None = None) -> Scalar:
    def atom(name):
        if allowed is not None and name not in allowed:
            raise KeyError(name)
        return Scalar.var(name)

    return parse_expression(text, atom, line)
