"""Exceptional parameter loci: splitting constraints and finding their points.

Only light factorization is attempted (monomial content, square-free parts,
linear factors, roots in Q(i) of univariate factors); anything else is
surfaced to the caller as an unresolved constraint.
"""

from __future__ import annotations

import math
from typing import Iterable

from gmpy2 import mpq

from .gaussian import GaussianRational, gaussian_sqrt, imag_part, real_part
from .poly import MultiPoly, p_exquo, p_gcd
from .scalar import Scalar

__all__ = ["constraint_factors", "univariate_roots", "zero_set_bindings", "merge_constraints"]


def _monic(p: MultiPoly) -> MultiPoly:
    v = p.variables()
    return p.with_gens(v, "grevlex").monic()


def _squarefree(p: MultiPoly) -> MultiPoly:
    for v in p.variables():
        d = p.diff(v)
        if d:
            g = p.gcd(d)
            if not g.is_constant():
                p = p.exquo(g)
    return p


def constraint_factors(p: MultiPoly) -> list[MultiPoly]:
    """Split ``p = 0`` into simpler monic constraints with the same zero set."""
    if p.is_constant():
        return []
    p = _monic(p)
    out: list[MultiPoly] = []
    gens = p.gens
    # monomial content
    for i, g in enumerate(gens):
        e = min(m[i] for m in p.dict)
        if e:
            out.append(MultiPoly.var(g))
            shift = tuple(e if j == i else 0 for j in range(len(gens)))
            p = MultiPoly._raw(gens, {tuple(a - b for a, b in zip(m, shift)): c for m, c in p.dict.items()})
    p = _monic(p)
    if not p.is_constant():
        p = _monic(_squarefree(p))
        vs = p.variables()
        if len(vs) == 1:
            roots, rest = univariate_roots(p)
            x = MultiPoly.var(vs[0])
            out.extend(_monic(x - MultiPoly.constant(r, x.gens)) for r in roots)
            if not rest.is_constant():
                out.append(_monic(rest))
        else:
            out.append(p)
    uniq: dict = {}
    for f in out:
        uniq.setdefault(str(f), f)
    return sorted(uniq.values(), key=lambda f: (f.total_degree(), str(f)))


def merge_constraints(polys: Iterable[MultiPoly]) -> list[MultiPoly]:
    uniq: dict = {}
    for p in polys:
        for f in constraint_factors(p):
            uniq.setdefault(str(f), f)
    return sorted(uniq.values(), key=lambda f: (f.total_degree(), str(f)))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return [0]
    ds = []
    for k in range(1, math.isqrt(n) + 1):
        if n % k == 0:
            ds.append(k)
            ds.append(n // k)
    return sorted(set(ds))


def univariate_roots(p: MultiPoly):
    """Roots of a univariate polynomial lying in Q(i), and the cofactor left unsolved."""
    vs = p.variables()
    if len(vs) != 1:
        raise ValueError("expected a univariate polynomial")
    p = p.with_gens(vs)
    coeffs: dict[int, object] = {m[0]: c for m, c in p.dict.items()}
    roots: list = []
    real = all(not imag_part(c) for c in coeffs.values())

    def horner_div(cs: dict, r):
        deg = max(cs)
        out = {}
        acc = mpq(0)
        for k in range(deg, -1, -1):
            acc = acc * r + cs.get(k, mpq(0))
            if k:
                out[k - 1] = acc
        return out, acc

    def ev(cs, r):
        return horner_div(cs, r)[1]

    while coeffs and max(coeffs) >= 1:
        deg = max(coeffs)
        if deg == 1:
            roots.append(-coeffs.get(0, mpq(0)) / coeffs[1])
            coeffs = {0: mpq(1)}
            break
        if deg == 2:
            a, b, c = coeffs[2], coeffs.get(1, mpq(0)), coeffs.get(0, mpq(0))
            s = gaussian_sqrt(b * b - 4 * a * c)
            if s is None:
                break
            roots.extend([(-b + s) / (2 * a), (-b - s) / (2 * a)])
            coeffs = {0: mpq(1)}
            break
        found = None
        if real:
            den = 1
            for c in coeffs.values():
                den = den * c.denominator // math.gcd(den, int(c.denominator))
            ints = {k: int(real_part(c) * den) for k, c in coeffs.items()}
            lead, low = ints[deg], ints.get(0, 0)
            if low == 0:
                found = mpq(0)
            else:
                for q in _divisors(lead):
                    for pp in _divisors(low):
                        for sgn in (1, -1):
                            r = mpq(sgn * pp, q)
                            if not ev(coeffs, r):
                                found = r
                                break
                        if found is not None:
                            break
                    if found is not None:
                        break
        else:
            for r in (mpq(0), GaussianRational(0, 1), GaussianRational(0, -1), mpq(1), mpq(-1)):
                if not ev(coeffs, r):
                    found = r
                    break
        if found is None:
            break
        roots.append(found)
        coeffs = horner_div(coeffs, found)[0]
        coeffs = {k: c for k, c in coeffs.items() if c}
    x = vs[0]
    rest = MultiPoly((x,), {(k,): c for k, c in coeffs.items()})
    uniq = []
    for r in roots:
        if r not in uniq:
            uniq.append(r)
    return uniq, rest


def zero_set_bindings(f: MultiPoly):
    """Substitutions parametrizing ``f = 0``; ``None`` if not expressible that simply.

    A factor linear in some variable with constant coefficient is solved for
    it; a univariate factor contributes one binding per root in Q(i).
    """
    vs = f.variables()
    if not vs:
        return []
    for v in sorted(vs):
        if f.degree(v) == 1:
            x = MultiPoly.var(v, f.gens)
            coeff = f.diff(v)
            if coeff.is_constant():
                rest = f - x * coeff
                return [{v: Scalar.from_polys(-rest) / Scalar(coeff.constant_value())}]
    if len(vs) == 1:
        roots, rest = univariate_roots(f)
        if not rest.is_constant():
            return None
        return [{vs[0]: Scalar(r)} for r in roots]
    return None
