"""Buchberger's algorithm with Gebauer-Moeller pair pruning and a resource budget.

Exhausting the budget never produces a wrong answer: the partial basis only
contains ideal members, so it can confirm membership but not refute it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .poly import MultiPoly, order_key, p_monic

__all__ = [
    "PolyIdeal",
    "Budget",
    "GroebnerResult",
    "QueryResult",
    "groebner",
    "ideal_query",
    "normal_form",
    "eliminate",
    "find_point",
]


@dataclass(frozen=True)
class Budget:
    max_reductions: int = 200_000
    max_degree: int = 24


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class PolyIdeal:
    """Ideal given by generators over a fixed tuple of indeterminates."""

    gens: tuple
    generators: tuple
    order: str = "grevlex"

    def __init__(self, generators: Iterable[MultiPoly], gens: Sequence[str] | None = None, order: str = "grevlex"):
        generators = list(generators)
        if gens is None:
            seen: list[str] = []
            for g in generators:
                for v in g.gens:
                    if v not in seen:
                        seen.append(v)
            gens = tuple(sorted(seen))
        gens = tuple(gens)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "generators", tuple(g.with_gens(gens, order) for g in generators if g))

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.generators)

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


@dataclass(frozen=True)
class GroebnerResult:
    basis: PolyIdeal
    status: str
    reductions: int = 0

    @property
    def complete(self) -> bool:
        return self.status == "complete"


@dataclass(frozen=True)
class QueryResult:
    answer: bool | None
    status: str

    def __bool__(self):
        return bool(self.answer)


class _BudgetExceeded(Exception):
    pass


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


class _Engine:
    def __init__(self, nvars: int, order: str, budget: Budget):
        self.n = nvars
        self.key = order_key(order)
        self.budget = budget
        self.reductions = 0
        self.polys: list[dict] = []
        self.lms: list[tuple] = []

    def leading(self, p):
        key = self.key
        m = max(p, key=key)
        return m, p[m]

    def reduce(self, p: dict, basis: list[int], full: bool = True) -> dict:
        """Normal form of ``p`` modulo the polynomials indexed by ``basis``."""
        key = self.key
        p = dict(p)
        rem: dict = {}
        polys, lms = self.polys, self.lms
        limit = self.budget.max_reductions
        while p:
            m = max(p, key=key)
            c = p[m]
            for i in basis:
                gm = lms[i]
                if _divides(gm, m):
                    g = polys[i]
                    q = tuple(x - y for x, y in zip(m, gm))
                    f = c / g[gm]
                    for mm, cc in g.items():
                        t = tuple(x + y for x, y in zip(mm, q))
                        v = p.get(t)
                        if v is None:
                            p[t] = -f * cc
                        else:
                            v = v - f * cc
                            if v:
                                p[t] = v
                            else:
                                del p[t]
                    self.reductions += 1
                    if self.reductions > limit:
                        raise _BudgetExceeded
                    break
            else:
                if not full:
                    rem.update(p)
                    return rem
                rem[m] = c
                del p[m]
        return rem

    def add(self, p: dict) -> int:
        p = p_monic(p, self.key)
        self.polys.append(p)
        self.lms.append(self.leading(p)[0])
        return len(self.polys) - 1

    def spoly(self, i: int, j: int) -> dict:
        f, g = self.polys[i], self.polys[j]
        mf, mg = self.lms[i], self.lms[j]
        l = _lcm(mf, mg)
        qf = tuple(x - y for x, y in zip(l, mf))
        qg = tuple(x - y for x, y in zip(l, mg))
        out: dict = {}
        for mm, cc in f.items():
            out[tuple(x + y for x, y in zip(mm, qf))] = cc
        for mm, cc in g.items():
            t = tuple(x + y for x, y in zip(mm, qg))
            v = out.get(t)
            if v is None:
                out[t] = -cc
            else:
                v = v - cc
                if v:
                    out[t] = v
                else:
                    del out[t]
        return out

    def run(self, inputs: list[dict]) -> tuple[list[int], bool]:
        G: list[int] = []
        pairs: list = []
        key = self.key
        lms = self.lms
        counter = 0
        for p in sorted(inputs, key=lambda q: key(self.leading(q)[0])):
            p = self.reduce(p, G) if G else p
            if not p:
                continue
            h = self.add(p)
            if not any(lms[h]):
                return [h], True
            G, pairs, counter = self._update(G, pairs, h, counter)
        while pairs:
            _, _, i, j = heapq.heappop(pairs)
            if i not in G or j not in G:
                # pairs are kept even if a generator became redundant
                pass
            s = self.spoly(i, j)
            if not s:
                continue
            h_poly = self.reduce(s, G)
            if not h_poly:
                continue
            h = self.add(h_poly)
            if not any(lms[h]):
                return [h], True
            if sum(lms[h]) > self.budget.max_degree:
                raise _BudgetExceeded
            G, pairs, counter = self._update(G, pairs, h, counter)
        return G, True

    def _update(self, G: list[int], pairs: list, h: int, counter: int):
        lms = self.lms
        key = self.key
        mh = lms[h]
        C = [g for g in G]
        D: list[int] = []
        while C:
            g = C.pop()
            lg = _lcm(lms[g], mh)
            if _coprime(lms[g], mh):
                D.append(g)
                continue
            if any(_divides(_lcm(lms[o], mh), lg) for o in C) or any(_divides(_lcm(lms[o], mh), lg) for o in D):
                continue
            D.append(g)
        E = [g for g in D if not _coprime(lms[g], mh)]
        kept = []
        for entry in pairs:
            _, _, a, b = entry
            l = _lcm(lms[a], lms[b])
            if _divides(mh, l) and _lcm(lms[a], mh) != l and _lcm(lms[b], mh) != l:
                continue
            kept.append(entry)
        for g in E:
            l = _lcm(lms[g], mh)
            counter += 1
            kept.append(((sum(l), key(l)), counter, g, h))
        heapq.heapify(kept)
        newG = [g for g in G if not _divides(mh, lms[g])] + [h]
        return newG, kept, counter

    def reduced(self, G: list[int]) -> list[dict]:
        lms = self.lms
        minimal = []
        for g in G:
            if not any(o != g and _divides(lms[o], lms[g]) and (lms[o] != lms[g] or o < g) for o in G):
                minimal.append(g)
        out = []
        for g in minimal:
            others = [o for o in minimal if o != g]
            r = self.reduce(self.polys[g], others)
            out.append(p_monic(r, self.key))
        out.sort(key=lambda p: self.key(self.leading(p)[0]))
        return out


def groebner(ideal: PolyIdeal, budget: Budget | None = None) -> GroebnerResult:
    """Reduced Groebner basis of ``ideal`` under its declared order."""
    budget = budget or DEFAULT_BUDGET
    n = len(ideal.gens)
    eng = _Engine(n, ideal.order, budget)
    inputs = [dict(g.dict) for g in ideal.generators if g]
    if not inputs:
        return GroebnerResult(PolyIdeal([], ideal.gens, ideal.order), "complete", 0)
    try:
        G, _ = eng.run(inputs)
        polys = eng.reduced(G)
        status = "complete"
    except _BudgetExceeded:
        polys = [eng.polys[i] for i in range(len(eng.polys))]
        status = "budget_exceeded"
    basis = PolyIdeal([MultiPoly._raw(ideal.gens, p, ideal.order) for p in polys], ideal.gens, ideal.order)
    return GroebnerResult(basis, status, eng.reductions)


def normal_form(f: MultiPoly, basis: PolyIdeal) -> MultiPoly:
    eng = _Engine(len(basis.gens), basis.order, Budget(max_reductions=10**12))
    idx = [eng.add(dict(g.dict)) for g in basis.generators]
    f = f.with_gens(basis.gens, basis.order)
    return MultiPoly._raw(basis.gens, eng.reduce(f.dict, idx), basis.order)


def ideal_query(gb: GroebnerResult | PolyIdeal, query: str, f: MultiPoly | None = None) -> QueryResult:
    """``is_unit`` or ``contains`` against a Groebner basis.

    Negative answers from a basis whose computation ran out of budget are
    reported as inconclusive (``answer=None``).
    """
    if isinstance(gb, PolyIdeal):
        gb = GroebnerResult(gb, "complete")
    status = gb.status
    if query == "is_unit":
        if gb.basis.is_unit():
            return QueryResult(True, status)
        return QueryResult(False if gb.complete else None, status)
    if query == "contains":
        if f is None:
            raise ValueError("contains query needs a polynomial")
        if not f:
            return QueryResult(True, status)
        if gb.basis.is_unit():
            return QueryResult(True, status)
        r = normal_form(f, gb.basis)
        if not r:
            return QueryResult(True, status)
        return QueryResult(False if gb.complete else None, status)
    raise ValueError(f"unknown query {query!r}")


def eliminate(ideal: PolyIdeal, names: Sequence[str], budget: Budget | None = None) -> GroebnerResult:
    """Groebner basis of the elimination ideal ``ideal ∩ Q(i)[remaining]``."""
    names = list(names)
    rest = [g for g in ideal.gens if g not in names]
    gens = tuple(names + rest)
    res = groebner(PolyIdeal(ideal.generators, gens, f"elim:{len(names)}"), budget)
    keep = [g for g in res.basis.generators if not any(g.degree(v) > 0 for v in names)]
    return GroebnerResult(PolyIdeal([g.with_gens(gens) for g in keep], gens, f"elim:{len(names)}"),
                          res.status, res.reductions)


_CANDIDATES = [mpq(0), mpq(1), mpq(-1), mpq(2), mpq(-2), mpq(1, 2), mpq(3), mpq(-1, 2), mpq(-3)]


def find_point(ideal: PolyIdeal, budget: Budget | None = None, candidates=None, fixed: dict | None = None):
    """Search a point of the zero set with coordinates in Q(i).

    Variables are fixed one at a time, trying the roots of univariate basis
    elements first and then small rationals.  Returns a dict or ``None``.
    """
    from .locus import univariate_roots
    from .scalar import Scalar

    candidates = candidates or _CANDIDATES
    fixed = dict(fixed or {})
    gb = groebner(ideal, budget)
    if not gb.complete or gb.basis.is_unit():
        return None
    gens = ideal.gens
    free = [v for v in gens if v not in fixed]
    if not free:
        return fixed if not gb.basis.generators else None
    if not gb.basis.generators:
        return {**fixed, **{v: mpq(0) for v in free}}
    # prefer a variable constrained by a univariate element
    choice, options = None, None
    for g in gb.basis.generators:
        vs = g.variables()
        if len(vs) == 1:
            roots, rest = univariate_roots(g)
            choice, options = vs[0], roots
            break
    if choice is None:
        choice = free[-1]
        options = candidates
    for val in options:
        sub = []
        for g in gb.basis.generators:
            s = Scalar.from_polys(g).substitute({choice: Scalar(val)})
            if s:
                sub.append(s.numerator)
        if any(p.is_constant() for p in sub):
            continue
        rest_gens = tuple(v for v in gens if v != choice)
        if not rest_gens:
            if not sub:
                return {**fixed, choice: val}
            continue
        sub_ideal = PolyIdeal([p.with_gens(rest_gens) for p in sub], rest_gens, ideal.order)
        pt = find_point(sub_ideal, budget, candidates, {})
        if pt is not None:
            return {**fixed, **pt, choice: val}
    return None
