"""Non-degeneration certificates.

A certificate asserts that the target is not in the orbit closure of the
source family.  Rules:

* invariant comparisons (``ann_left_gt``, ``square_lt``, ``plus_square_lt``,
  ``der_dim``) using semicontinuity of kernel and rank dimensions;
* closed subspace conditions (``trivial_subalg``, ``anticomm_subalg``,
  ``nilradical_dim``): the source family has the subspace for every
  parameter value, the target does not;
* ``six_tuple`` for standard structures;
* ``closed_set``: a Borel-stable closed set containing the source family
  and missing the target orbit;
* ``lie_ann``: non-Lie families never degenerate to a Lie algebra with
  zero annihilator.

Target families are read generically: one member outside the closure is
enough for the target family not to be contained in it.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .algebra import (
    AlgebraStructure,
    Subspace,
    act,
    annihilators,
    change_basis,
    derivation_dim,
    is_lie,
    is_nilpotent,
    is_solvable,
    plus_square,
    square,
    subspace_dim_stratified,
    subspace_product,
)
from .catalog import Catalog, builtin_catalog
from .exactmath import (
    Budget,
    MultiPoly,
    PolyIdeal,
    Scalar,
    ScalarMatrix,
    ScalarParseError,
    eliminate,
    groebner,
    ideal_query,
    mat_solve,
    parse_scalar,
    rref,
)
from .exactmath.locus import constraint_factors, zero_set_bindings
from .exactmath.scalar import ONE, ZERO
from .subspaces import (
    NILPOTENT_IDEAL,
    TRIVIAL,
    SubspaceProperty,
    anticommutative,
    exists_subspace,
)

__all__ = [
    "RULES",
    "NotStandardError",
    "SixTuple",
    "AffineForm",
    "check_standard",
    "six_tuple",
    "vanishing_forms",
    "six_tuple_obstruction",
    "ClosedSetSpec",
    "closed_set_membership",
    "borel_stability",
    "OrbitRefutation",
    "orbit_refute",
    "SeparationCertificate",
    "SeparationReport",
    "parse_separation",
    "serialize_separation",
    "verify_separation",
    "invariant_separation",
    "lie_ann_separation",
    "fingerprint",
    "family_invariants",
]

RULES = (
    "ann_left_gt",
    "square_lt",
    "plus_square_lt",
    "der_dim",
    "trivial_subalg",
    "anticomm_subalg",
    "six_tuple",
    "closed_set",
    "lie_ann",
    "nilradical_dim",
)


class NotStandardError(ValueError):
    pass


# ---------------------------------------------------------------------------
# standard structures and the 6-tuple


def _standard_violations(A: AlgebraStructure) -> list[str]:
    if A.dim != 4:
        return ["dimension is not 4"]
    out = []
    c = A.c
    for i in range(1, 4):
        for j in range(1, 4):
            for k in range(max(i, j) + 1):
                if c[i][j][k]:
                    out.append(f"c_{i + 1}{j + 1}^{k + 1} = {c[i][j][k]} should vanish")
    for i in range(1, 4):
        for j in range(i + 1, 4):
            if c[0][i][j]:
                out.append(f"c_1{i + 1}^{j + 1} = {c[0][i][j]} should vanish")
            if c[i][0][j]:
                out.append(f"c_{i + 1}1^{j + 1} = {c[i][0][j]} should vanish")
    N = Subspace.tail(4, 2)
    W = Subspace.whole(4)
    if not (subspace_product(A, W, N) <= N and subspace_product(A, N, W) <= N):
        out.append("<e2,e3,e4> is not an ideal")
    if is_nilpotent(A):
        out.append("the structure is nilpotent")
    return out


def check_standard(A: AlgebraStructure) -> bool:
    """Vanishing pattern holds, ``<e2,e3,e4>`` is a nilpotent ideal and ``A`` itself is not nilpotent."""
    return not _standard_violations(A)


_SIX = ((1, 0, 1), (2, 0, 2), (3, 0, 3), (0, 1, 1), (0, 2, 2), (0, 3, 3))


@dataclass(frozen=True)
class SixTuple:
    """``(c21^2, c31^3, c41^4, c12^2, c13^3, c14^4)``; pair ``k`` is ``(x_k, x_{k+3})``."""

    values: tuple

    @property
    def pairs(self) -> tuple:
        v = self.values
        return tuple((v[k], v[k + 3]) for k in range(3))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return 6

    def __getitem__(self, i):
        return self.values[i]

    def scaled(self, c) -> "SixTuple":
        c = Scalar(c) if not isinstance(c, Scalar) else c
        return SixTuple(tuple(c * x for x in self.values))

    def permuted(self, sigma: Sequence[int]) -> "SixTuple":
        v = self.values
        return SixTuple(tuple(v[s] for s in sigma) + tuple(v[s + 3] for s in sigma))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.values) + ")"


def six_tuple(A: AlgebraStructure, strict: bool = True) -> SixTuple:
    """Marked constants of ``A``; with ``strict=False`` they are read off even
    when ``A`` is not standard (the orbit law then does not apply)."""
    bad = _standard_violations(A) if strict else None
    if bad:
        raise NotStandardError(f"{A.label or 'structure'} is not standard: {bad[0]}")
    return SixTuple(tuple(A.c[i][j][k] for i, j, k in _SIX))


@dataclass(frozen=True)
class AffineForm:
    """``w0 + w1 x1 + ... + w6 x6``."""

    coeffs: tuple  # 7 Scalars

    def __call__(self, values: Sequence) -> Scalar:
        acc = self.coeffs[0]
        for w, x in zip(self.coeffs[1:], values):
            if w:
                acc = acc + w * x
        return acc

    def linear_part(self, values: Sequence) -> Scalar:
        acc = ZERO
        for w, x in zip(self.coeffs[1:], values):
            if w:
                acc = acc + w * x
        return acc

    def __str__(self):
        parts = []
        for k in range(6, 0, -1):
            w = self.coeffs[k]
            if not w:
                continue
            if w == ONE:
                parts.append(f"+x{k}")
            elif w == -ONE:
                parts.append(f"-x{k}")
            else:
                s = str(w)
                parts.append(f"{s if s.startswith('-') else '+' + s}*x{k}")
        w0 = self.coeffs[0]
        if w0:
            s = str(w0)
            parts.append(s if s.startswith("-") else "+" + s)
        out = "".join(parts).lstrip("+")
        return out or "0"


def _poly_coefficients(x: Scalar, den: Scalar) -> dict:
    """Monomial -> coefficient of the polynomial ``x * den``."""
    y = x * den
    if not y.is_polynomial():
        raise ArithmeticError("common denominator did not clear")
    p = y.numerator
    return {tuple(zip(p.gens, m)): c for m, c in p.dict.items()}


def vanishing_forms(family: Iterable) -> list[AffineForm]:
    """Basis of the affine forms vanishing identically on every tuple of the family."""
    tuples = [t if isinstance(t, SixTuple) else SixTuple(tuple(t)) for t in family]
    rows = []
    for t in tuples:
        den = ONE
        for x in t.values:
            if not x.is_polynomial():
                den = den * Scalar.from_polys(x.denominator)
        cols = [_poly_coefficients(ONE, den)] + [_poly_coefficients(x, den) for x in t.values]
        monos = set()
        for c in cols:
            for m in c:
                monos.add(tuple(sorted((v, e) for v, e in m if e)))
        for mono in sorted(monos):
            row = []
            for c in cols:
                val = ZERO
                for m, coef in c.items():
                    if tuple(sorted((v, e) for v, e in m if e)) == mono:
                        val = val + Scalar(coef)
                row.append(val)
            rows.append(row)
    if not rows:
        kernel = [[ONE if i == j else ZERO for i in range(7)] for j in range(7)]
    else:
        M = ScalarMatrix.from_rows(rows)
        kernel = mat_solve(M, "kernel_basis").kernel
    forms = []
    for v in kernel:
        v = list(v)
        # normalise: leading (highest index) coefficient 1
        for k in range(6, -1, -1):
            if v[k]:
                lead = v[k]
                v = [x / lead for x in v]
                break
        forms.append(AffineForm(tuple(v)))
    return forms


@dataclass(frozen=True)
class ObstructionResult:
    verdict: str  # refuted | not_refuted
    witnesses: tuple = ()  # (sigma, c) pairs that satisfy every form

    def __bool__(self):
        return self.verdict == "refuted"


def six_tuple_obstruction(forms: Sequence[AffineForm], target) -> ObstructionResult:
    """Is there a pair permutation and a scale ``c != 0`` sending the target tuple onto the forms' zero set?

    For each permutation the forms are affine in ``c``; the constraints are
    solved exactly (identically in any target parameters).
    """
    target = target if isinstance(target, SixTuple) else SixTuple(tuple(Scalar(x) for x in target))
    witnesses = []
    for sigma in itertools.permutations(range(3)):
        t = target.permuted(sigma)
        c = None
        free = True
        ok = True
        for f in forms:
            w0 = f.coeffs[0]
            L = f.linear_part(t.values)
            if not L:
                if w0:
                    ok = False
                    break
                continue
            val = -w0 / L
            if free:
                c, free = val, False
            elif val != c:
                ok = False
                break
        if not ok:
            continue
        if free:
            witnesses.append((sigma, ONE))
        elif c:
            witnesses.append((sigma, c))
    return ObstructionResult("not_refuted" if witnesses else "refuted", tuple(witnesses))


# ---------------------------------------------------------------------------
# closed sets


def _c_name(i: int, j: int, k: int) -> str:
    return f"c_{i}_{j}_{k}"


_C_NAMES = {_c_name(i, j, k) for i in range(1, 5) for j in range(1, 5) for k in range(1, 5)}


@dataclass(frozen=True)
class ClosedSetSpec:
    """Conditions ``S_i S_j ⊆ S_k`` (``k = 0`` for ``= 0``) and polynomial equations in ``c_i_j_k``."""

    containments: tuple = ()
    equations: tuple = ()  # Scalars in c_i_j_k
    n: int = 4

    def __post_init__(self):
        for t in self.containments:
            i, j, k = t
            if not (1 <= i <= self.n and 1 <= j <= self.n and 0 <= k <= self.n):
                raise ValueError(f"containment indices out of range: {t}")
        for e in self.equations:
            if not e.is_polynomial():
                raise ValueError("closed-set equations must be polynomial")
            bad = [g for g in e.gens if g not in _all_c_names(self.n)]
            if bad:
                raise ValueError(f"unknown tokens in equation: {bad}")

    @classmethod
    def parse(cls, contain: Iterable[str], eqs: Iterable[str], n: int = 4) -> "ClosedSetSpec":
        cont = []
        for line in contain:
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"contain needs three indices: {line!r}")
            cont.append(tuple(int(x) for x in parts))
        eq = [parse_scalar(e, _all_c_names(n)) for e in eqs]
        return cls(tuple(cont), tuple(eq), n)

    def zero_positions(self) -> set:
        """0-based ``(a, b, m)`` forced to vanish by the containments."""
        out = set()
        n = self.n
        for i, j, k in self.containments:
            top = n if k == 0 else k - 1
            for a in range(i - 1, n):
                for b in range(j - 1, n):
                    for m in range(top):
                        out.add((a, b, m))
        return out

    def describe(self) -> list[str]:
        out = []
        for i, j, k in self.containments:
            out.append(f"S{i}S{j} = 0" if k == 0 else f"S{i}S{j} ⊆ S{k}")
        out.extend(f"{e} = 0" for e in self.equations)
        return out


@lru_cache(maxsize=None)
def _all_c_names(n: int) -> frozenset:
    return frozenset(_c_name(i, j, k) for i in range(1, n + 1) for j in range(1, n + 1) for k in range(1, n + 1))


def closed_set_membership(A: AlgebraStructure, R: ClosedSetSpec) -> bool:
    n = A.dim
    for i, j, k in R.containments:
        target = Subspace.tail(n, n + 1 if k == 0 else k)
        if not subspace_product(A, Subspace.tail(n, i), Subspace.tail(n, j)) <= target:
            return False
    vals = {_c_name(i + 1, j + 1, k + 1): A.c[i][j][k] for i in range(n) for j in range(n) for k in range(n)}
    for e in R.equations:
        if e.substitute({g: vals[g] for g in e.gens}):
            return False
    return True


def _equation_poly(e: Scalar, gens: tuple) -> MultiPoly:
    return e.numerator.with_gens(gens)


def borel_stability(R: ClosedSetSpec, budget: Budget | None = None) -> str:
    """``stable`` | ``not_stable`` | ``inconclusive`` under generic lower-triangular ``g``."""
    n = R.n
    zero = R.zero_positions()
    cvars = [(a, b, m) for a in range(n) for b in range(n) for m in range(n) if (a, b, m) not in zero]
    gvars = [(i, j) for i in range(n) for j in range(i)]
    cname = {p: _c_name(p[0] + 1, p[1] + 1, p[2] + 1) for p in cvars}
    gname = {p: f"g_{p[0] + 1}_{p[1] + 1}" for p in gvars}
    dname = [f"d_{i + 1}" for i in range(n)]
    gens = tuple(sorted(cname.values())) + tuple(gname[p] for p in gvars) + tuple(dname) + ("z",)

    def var(name):
        return MultiPoly.var(name, gens)

    one = MultiPoly.constant(1, gens)
    zero_p = MultiPoly.constant(0, gens)
    G = [[zero_p] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = var(dname[i])
        for j in range(i):
            G[i][j] = var(gname[(i, j)])
    D = one
    for x in dname:
        D = D * var(x)
    adj = _adjugate(G, zero_p, one)  # g^-1 = adj / D
    C = {p: var(cname[p]) for p in cvars}
    # D^2 c'_ij^k = sum adj_pi adj_qj c_pq^m g_km
    cp = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = zero_p
                for (p, q, m), cv in C.items():
                    a1, a2, g3 = adj[p][i], adj[q][j], G[k][m]
                    if a1 and a2 and g3:
                        acc = acc + a1 * a2 * cv * g3
                cp[(i, j, k)] = acc
    ideal_gens = [_equation_poly(e.substitute({_c_name(a + 1, b + 1, m + 1): 0 for (a, b, m) in zero}), gens)
                  for e in R.equations]
    ideal_gens = [g for g in ideal_gens if g]
    ideal_gens.append(var("z") * D - one)
    gb = groebner(PolyIdeal(ideal_gens, gens), budget)
    if gb.basis.is_unit():
        return "stable"  # empty set
    checks = [cp[p] for p in zero]
    D2 = D * D
    for e in R.equations:
        checks.append(_transform_equation(e, cp, D2, gens, n))
    undecided = False
    for f in checks:
        if not f:
            continue
        q = ideal_query(gb, "contains", f)
        if q.answer is False:
            return "not_stable"
        if q.answer is None:
            undecided = True
    return "inconclusive" if undecided else "stable"


def _adjugate(G, zero_p, one):
    n = len(G)

    def det(rows, cols):
        if not rows:
            return one
        r = rows[0]
        acc = zero_p
        for idx, c in enumerate(cols):
            if not G[r][c]:
                continue
            sub = det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = G[r][c] * sub
            acc = acc + term if idx % 2 == 0 else acc - term
        return acc

    adj = [[zero_p] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = [r for r in range(n) if r != j]
            cols = [c for c in range(n) if c != i]
            m = det(rows, cols)
            adj[i][j] = m if (i + j) % 2 == 0 else -m
    return adj


def _transform_equation(e: Scalar, cp: dict, D2: MultiPoly, gens: tuple, n: int) -> MultiPoly:
    """``D^(2 deg) e(c')`` as a polynomial, given ``D^2 c'`` in ``cp``."""
    p = e.numerator
    deg = p.total_degree()
    idx = {}
    for g in p.gens:
        m = re.match(r"c_(\d+)_(\d+)_(\d+)$", g)
        idx[g] = (int(m.group(1)) - 1, int(m.group(2)) - 1, int(m.group(3)) - 1)
    out = MultiPoly.constant(0, gens)
    for mono, coef in p.dict.items():
        term = MultiPoly.constant(coef, gens)
        k = 0
        for g, ex in zip(p.gens, mono):
            for _ in range(ex):
                term = term * cp[idx[g]]
                k += 1
        for _ in range(deg - k):
            term = term * D2
        out = out + term
    return out


def _closed_set_equations(A: AlgebraStructure, R: ClosedSetSpec) -> list[Scalar]:
    """Conditions on the constants of ``A`` (with symbolic entries) for membership in ``R``."""
    n = A.dim
    eqs = [A.c[a][b][m] for (a, b, m) in sorted(R.zero_positions()) if A.c[a][b][m]]
    vals = {_c_name(i + 1, j + 1, k + 1): A.c[i][j][k] for i in range(n) for j in range(n) for k in range(n)}
    for e in R.equations:
        v = e.substitute({g: vals[g] for g in e.gens})
        if v:
            eqs.append(v)
    return eqs


@dataclass(frozen=True)
class OrbitRefutation:
    verdict: str  # refuted | not_refuted | inconclusive
    method: str
    generic: bool = False  # refuted only off a proper subset of parameter values
    exceptional: tuple = ()  # (binding text, verdict)
    cells: tuple = ()  # per Weyl element: (perm, status)
    detail: str = ""

    def __bool__(self):
        return self.verdict == "refuted"


def _unipotent(n: int) -> tuple[ScalarMatrix, tuple]:
    names = []
    rows = []
    for i in range(n):
        r = []
        for j in range(n):
            if i == j:
                r.append(ONE)
            elif j < i:
                nm = f"u_{i + 1}_{j + 1}"
                names.append(nm)
                r.append(Scalar.var(nm))
            else:
                r.append(ZERO)
        rows.append(r)
    return ScalarMatrix.from_rows(rows), tuple(names)


def _system_status(eqs: list[Scalar], gens: tuple, budget) -> tuple[str, object]:
    polys = [e.numerator.with_gens(gens) for e in eqs if e]
    if any(p.is_constant() for p in polys):
        return "unit", None
    if not polys:
        return "solvable", None
    gb = groebner(PolyIdeal(polys, gens), budget)
    q = ideal_query(gb, "is_unit")
    if q.answer is True:
        return "unit", gb
    if q.answer is None:
        return "budget", gb
    return "solvable", gb


def orbit_refute(B: AlgebraStructure, R: ClosedSetSpec, method: str = "auto",
                 budget: Budget | None = None, stability: str | None = None) -> OrbitRefutation:
    """Certify that no point of the orbit of ``B`` lies in ``R`` (unit ideal).

    ``method="bruhat"`` uses ``GL = ⋃ B w B``: when ``R`` is stable under the
    lower-triangular group, ``g*B ∈ R`` for some ``g`` iff ``(w u)*B ∈ R`` for a
    permutation ``w`` and a lower unitriangular ``u`` (6 unknowns per cell).
    ``method="direct"`` solves the system in the 16 entries of ``g`` and ``y``
    with ``det(g) y = 1``.  ``auto`` picks bruhat when stability is certified.
    """
    n = B.dim
    if method == "auto":
        stability = stability or borel_stability(R, budget)
        method = "bruhat" if stability == "stable" else "direct"
    if method == "bruhat":
        stability = stability or borel_stability(R, budget)
        if stability != "stable":
            return OrbitRefutation("inconclusive", method, detail=f"closed set is {stability} under the Borel subgroup")
        return _orbit_bruhat(B, R, budget)
    if method == "direct":
        return _orbit_direct(B, R, budget)
    raise ValueError(f"unknown method {method!r}")


def _orbit_bruhat(B: AlgebraStructure, R: ClosedSetSpec, budget) -> OrbitRefutation:
    n = B.dim
    U, unames = _unipotent(n)
    moved = act(U, B)
    params = tuple(p for p in B.variables())
    gens = unames + params
    cells = []
    open_cells = []
    undecided = False
    for perm in itertools.permutations(range(n)):
        W = ScalarMatrix.permutation(perm)
        C = act(W, moved)
        status, gb = _system_status(_closed_set_equations(C, R), gens, budget)
        cells.append((perm, status))
        if status == "budget":
            undecided = True
        elif status == "solvable":
            open_cells.append((perm, gb))
    if not open_cells and not undecided:
        return OrbitRefutation("refuted", "bruhat", cells=tuple(cells))
    if undecided:
        return OrbitRefutation("inconclusive", "bruhat", cells=tuple(cells), detail="Groebner budget exhausted")
    if not params:
        return OrbitRefutation("not_refuted", "bruhat", cells=tuple(cells),
                               detail="the orbit meets the closed set")
    # parametrized target: solvable only on a proper subset of parameter values?
    locus = []
    for perm, gb in open_cells:
        if gb is None:
            return OrbitRefutation("not_refuted", "bruhat", cells=tuple(cells),
                                   detail="the orbit meets the closed set for every parameter value")
        el = eliminate(gb.basis, list(unames), budget)
        polys = [p for p in el.basis.generators if p]
        if not el.complete or not polys:
            return OrbitRefutation("not_refuted", "bruhat", cells=tuple(cells),
                                   detail="the orbit meets the closed set for generic parameters")
        locus.append(polys[0])
    exceptional = []
    seen = set()
    for p in locus:
        for f in constraint_factors(p.with_gens(p.variables())):
            sols = zero_set_bindings(f)
            if sols is None:
                exceptional.append((f"{f} = 0", "unresolved"))
                continue
            for sol in sols:
                key = tuple(sorted((k, str(v)) for k, v in sol.items()))
                if key in seen:
                    continue
                seen.add(key)
                text = ", ".join(f"{k} = {v}" for k, v in sorted(sol.items()))
                try:
                    Bs = B.specialize(sol)
                except ArithmeticError:
                    exceptional.append((text, "undefined"))
                    continue
                sub = _orbit_bruhat(Bs, R, budget) if not Bs.variables() else None
                exceptional.append((text, sub.verdict if sub else "unresolved"))
    return OrbitRefutation("refuted", "bruhat", generic=True, exceptional=tuple(exceptional),
                           cells=tuple(cells), detail="refuted for generic parameter values")


def _orbit_direct(B: AlgebraStructure, R: ClosedSetSpec, budget) -> OrbitRefutation:
    n = B.dim
    names = [f"g_{i + 1}_{j + 1}" for i in range(n) for j in range(n)]
    G = ScalarMatrix.from_rows([[Scalar.var(names[i * n + j]) for j in range(n)] for i in range(n)])
    y = Scalar.var("y")
    det = G.det()
    # g^-1 = y adj(g); adj from cofactors
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = ScalarMatrix.from_rows([[G[r, c] for c in range(n) if c != i] for r in range(n) if r != j])
            m = minor.det()
            row.append(m if (i + j) % 2 == 0 else -m)
        adj.append(row)
    ginv = ScalarMatrix.from_rows([[y * x for x in r] for r in adj])
    C = change_basis(B, ginv.transpose(), inverse=G.transpose())
    eqs = _closed_set_equations(C, R) + [det * y - ONE]
    gens = tuple(names) + ("y",) + tuple(B.variables())
    status, _ = _system_status(eqs, gens, budget)
    verdict = {"unit": "refuted", "budget": "inconclusive", "solvable": "not_refuted"}[status]
    return OrbitRefutation(verdict, "direct", cells=((tuple(range(n)), status),),
                           detail="Groebner budget exhausted" if status == "budget" else "")


# ---------------------------------------------------------------------------
# invariants of families


def _generic_dim(A: AlgebraStructure, fn) -> tuple[int, tuple, tuple]:
    sd = subspace_dim_stratified(A, fn)
    return sd.generic, sd.strata, sd.unresolved


def _ann_left(A):
    return annihilators(A)[0]


def _ann_right(A):
    return annihilators(A)[1]


def _ann(A):
    return annihilators(A)[2]


_INVARIANT_FNS = {
    "ann_left": _ann_left,
    "ann_right": _ann_right,
    "ann": _ann,
    "square": square,
    "plus_square": plus_square,
}


def family_invariants(A: AlgebraStructure) -> dict:
    """Generic values and jump loci of the dimension invariants."""
    out = {key: _stratified(A, key) for key in _INVARIANT_FNS}
    out["der"] = _der(A)
    return out


@lru_cache(maxsize=1024)
def fingerprint(A: AlgebraStructure) -> tuple:
    """Generic isomorphism invariants, used to tell orbits apart."""
    inv = family_invariants(A)
    return (
        inv["ann_left"].generic,
        inv["ann_right"].generic,
        inv["ann"].generic,
        inv["square"].generic,
        inv["plus_square"].generic,
        inv["der"].generic_dim,
        is_lie(A),
        is_nilpotent(A),
        is_solvable(A),
    )


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class SeparationCertificate:
    rule: str
    sources: tuple
    targets: tuple
    closed_set: ClosedSetSpec | None = None
    relabel: tuple | None = None  # source basis as old indices, 1-based
    k: int | None = None
    bound: int | None = None
    note: str = ""
    name: str = ""

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.rule == "closed_set" and self.closed_set is None:
            raise ValueError("closed_set rule needs a closed_set block")
        if self.rule != "closed_set" and (self.closed_set is not None or self.relabel is not None):
            raise ValueError(f"rule {self.rule} takes no closed_set payload")
        if self.rule == "anticomm_subalg" and (self.k is None or self.bound is None):
            raise ValueError("anticomm_subalg needs k and bound")
        if self.rule == "trivial_subalg" and self.k is None:
            raise ValueError("trivial_subalg needs k")
        if not self.sources or not self.targets:
            raise ValueError("certificate needs a source and a target")

    @property
    def source(self) -> str:
        return self.sources[0]

    @property
    def target(self) -> str:
        return self.targets[0]


def _labels(text: str) -> tuple:
    return tuple(x.strip() for x in re.split(r"[;,]\s*(?![^{]*\})", text) if x.strip())


def parse_separation(text: str, source: str = "") -> SeparationCertificate:
    """Separation certificate file::

        rule: closed_set
        source: L_9^a, L_10^a
        target: L_15^a
        relabel: 1 3 2 4
        closed_set:
          contain: 1 1 2
          eq: c_1_3_3 + c_3_1_3
    """
    from .catalog import CatalogParseError

    fields: dict = {}
    contain: list[str] = []
    eqs: list[tuple[int, str]] = []
    in_block = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.match(r"^\s*([A-Za-z_]+)\s*:(.*)$", line)
        if not m:
            raise CatalogParseError("expected 'key: value'", lineno, 1, source)
        key, value = m.group(1).lower(), m.group(2).strip()
        if key == "closed_set":
            in_block = True
            continue
        if key in ("contain", "eq"):
            if not in_block:
                raise CatalogParseError(f"'{key}:' outside a closed_set block", lineno, 1, source)
            if key == "contain":
                parts = value.split()
                if len(parts) != 3 or not all(x.isdigit() for x in parts):
                    raise CatalogParseError(f"contain needs three indices: {value!r}", lineno, m.start(2) + 1, source)
                contain.append(value)
            else:
                eqs.append((lineno, value))
            continue
        if key in fields:
            raise CatalogParseError(f"duplicate field {key!r}", lineno, 1, source)
        if key not in ("rule", "source", "target", "relabel", "k", "bound", "note", "name"):
            raise CatalogParseError(f"unknown field {key!r}", lineno, 1, source)
        fields[key] = (lineno, value)
    for req in ("rule", "source", "target"):
        if req not in fields:
            raise CatalogParseError(f"missing '{req}:'", 1, 1, source)
    closed = None
    if in_block:
        try:
            eq_scalars = []
            for lineno, e in eqs:
                try:
                    eq_scalars.append(parse_scalar(e, _all_c_names(4), lineno))
                except ScalarParseError as exc:
                    raise CatalogParseError(str(exc), lineno, exc.column, source) from None
            closed = ClosedSetSpec(tuple(tuple(int(x) for x in c.split()) for c in contain), tuple(eq_scalars))
        except (ValueError, TypeError) as exc:
            if isinstance(exc, CatalogParseError):
                raise
            raise CatalogParseError(str(exc), 1, 1, source) from None
    relabel = None
    if "relabel" in fields:
        relabel = tuple(int(x) for x in fields["relabel"][1].split())
    ints = {}
    for key in ("k", "bound"):
        if key in fields:
            try:
                ints[key] = int(fields[key][1])
            except ValueError:
                raise CatalogParseError(f"{key} must be an integer", fields[key][0], 1, source) from None
    try:
        return SeparationCertificate(
            rule=fields["rule"][1],
            sources=_labels(fields["source"][1]),
            targets=_labels(fields["target"][1]),
            closed_set=closed,
            relabel=relabel,
            k=ints.get("k"),
            bound=ints.get("bound"),
            note=fields.get("note", (0, ""))[1],
            name=fields.get("name", (0, source))[1],
        )
    except ValueError as exc:
        raise CatalogParseError(str(exc), fields["rule"][0], 1, source) from None


def serialize_separation(cert: SeparationCertificate) -> str:
    lines = [f"rule: {cert.rule}", "source: " + ", ".join(cert.sources), "target: " + ", ".join(cert.targets)]
    if cert.relabel:
        lines.append("relabel: " + " ".join(str(x) for x in cert.relabel))
    if cert.k is not None:
        lines.append(f"k: {cert.k}")
    if cert.bound is not None:
        lines.append(f"bound: {cert.bound}")
    if cert.note:
        lines.append(f"note: {cert.note}")
    if cert.closed_set is not None:
        lines.append("closed_set:")
        for i, j, k in cert.closed_set.containments:
            lines.append(f"  contain: {i} {j} {k}")
        for e in cert.closed_set.equations:
            lines.append(f"  eq: {e}")
    return "\n".join(lines) + "\n"


@dataclass
class SeparationReport:
    certificate: SeparationCertificate | None
    rule: str
    verdict: str  # verified | failed | inconclusive
    diagnostics: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"

    def to_dict(self) -> dict:
        c = self.certificate
        return {
            "rule": self.rule,
            "sources": list(c.sources) if c else [],
            "targets": list(c.targets) if c else [],
            "verdict": self.verdict,
            "diagnostics": list(self.diagnostics),
            "details": {k: _jsonable(v) for k, v in sorted(self.details.items())},
        }


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return str(v)


def _restrictions(label_or_structure, catalog: Catalog | None) -> tuple:
    if isinstance(label_or_structure, AlgebraStructure):
        return ()
    if hasattr(label_or_structure, "restrictions"):
        return label_or_structure.restrictions
    catalog = catalog or builtin_catalog()
    if label_or_structure in catalog:
        return catalog.get(label_or_structure).restrictions
    return ()


def _excluded(restrictions, bindings) -> bool:
    """Stratum lies outside the family's declared parameter range."""
    b = dict(bindings)
    return any(r.violated_by(b) for r in restrictions)


def _structure(label_or_structure, catalog: Catalog | None) -> AlgebraStructure:
    if isinstance(label_or_structure, AlgebraStructure):
        return label_or_structure
    if hasattr(label_or_structure, "structure"):
        return label_or_structure.structure
    catalog = catalog or builtin_catalog()
    label = label_or_structure
    if re.match(r"^zero_?(\d+)$", label):
        return AlgebraStructure.zero(int(re.match(r"^zero_?(\d+)$", label).group(1)), label)
    return catalog.get(label).structure


def _stratum_dim(A: AlgebraStructure, s) -> int:
    return len(s.free)


@lru_cache(maxsize=4096)
def _stratified(A: AlgebraStructure, key: str):
    return subspace_dim_stratified(A, _INVARIANT_FNS[key])


@lru_cache(maxsize=1024)
def _der(A: AlgebraStructure):
    return derivation_dim(A)


@lru_cache(maxsize=4096)
def _exists(A: AlgebraStructure, k: int, prop: SubspaceProperty, mode: str, budget):
    return exists_subspace(A, k, prop, mode, budget)


def _fn_key(fn) -> str:
    for key, f in _INVARIANT_FNS.items():
        if f is fn:
            return key
    raise KeyError(fn)


def _dims_over_family(A: AlgebraStructure, fn, restrictions=()) -> list[tuple[str, int]]:
    sd = _stratified(A, _fn_key(fn))
    out = [("generic", sd.generic)]
    out.extend((s.constraint, s.value) for s in sd.strata if not _excluded(restrictions, s.bindings))
    return out


def invariant_separation(cert: SeparationCertificate, catalog: Catalog | None = None,
                         budget: Budget | None = None) -> SeparationReport:
    """Check the rule's inequality over every source parameter value and a generic target."""
    sources = [_structure(s, catalog) for s in cert.sources]
    restr = {A: _restrictions(s, catalog) for A, s in zip(sources, cert.sources)}
    target = _structure(cert.target, catalog)
    rule = cert.rule
    rep = SeparationReport(cert, rule, "verified")
    if rule in ("ann_left_gt", "square_lt", "plus_square_lt"):
        fn = {"ann_left_gt": _ann_left, "square_lt": square, "plus_square_lt": plus_square}[rule]
        # kernels only grow and ranks only drop on special parameter values
        tval = _stratified(target, _fn_key(fn)).generic
        rep.details["target"] = tval
        for A in sources:
            vals = _dims_over_family(A, fn, restr[A])
            rep.details[A.label] = vals
            for where, v in vals:
                ok = v > tval if rule == "ann_left_gt" else v < tval
                if not ok:
                    rep.verdict = "failed"
                    rep.diagnostics.append(f"{A.label} at {where}: {v} vs target {tval}")
                    return rep
        return rep
    if rule == "der_dim":
        tder = _der(target)
        td = tder.generic_dim
        rep.details["target"] = td
        tfp = None
        for A in sources:
            rp = _der(A)
            nparams = len(A.variables())
            strata = [("generic", rp.generic_dim, nparams)]
            strata.extend((s.constraint, s.value, _stratum_dim(A, s)) for s in rp.exceptional_locus
                          if not _excluded(restr[A], s.bindings))
            rep.details[A.label] = [(w, v, d) for w, v, d in strata]
            if rp.unresolved:
                # derivation algebras only grow on special values, so these strata satisfy the
                # inequality whenever the generic one does
                rep.details[A.label + " unresolved"] = list(rp.unresolved)
            for where, v, d in strata:
                lhs = v - d
                if lhs > td or (lhs == td and d > 0):
                    continue
                if lhs == td and d == 0:
                    tfp = tfp or fingerprint(target)
                    B = A if where == "generic" else None
                    if B is not None and fingerprint(B) != tfp:
                        continue
                rep.verdict = "failed"
                rep.diagnostics.append(f"{A.label} at {where}: Der {v} on a {d}-dim stratum vs target Der {td}")
                return rep
        return rep
    if rule in ("trivial_subalg", "anticomm_subalg", "nilradical_dim"):
        if rule == "trivial_subalg":
            prop, k = TRIVIAL, cert.k
        elif rule == "anticomm_subalg":
            prop, k = anticommutative(cert.bound), cert.k
        else:
            prop, k = NILPOTENT_IDEAL, cert.k or 3
        for A in sources:
            res = _exists(A, k, prop, "identical", budget)
            rep.details[A.label] = res.answer
            if res.answer != "yes":
                rep.verdict = "failed" if res.answer == "no" else "inconclusive"
                rep.diagnostics.append(f"{A.label} has no {k}-dim {prop} for all parameter values")
                return rep
            rep.details[A.label + " witness"] = [str(r) for r in _fmt_rows(res.witness)]
        res = _exists(target, k, prop, "generic", budget)
        rep.details["target"] = res.answer
        if res.exceptional:
            rep.details["target exceptional"] = [f"{p} = 0" for p in res.exceptional]
        if res.answer == "yes":
            rep.verdict = "failed"
            rep.diagnostics.append(f"{target.label} has a {k}-dim {prop}")
        elif res.answer == "inconclusive":
            rep.verdict = "inconclusive"
            rep.diagnostics.append(res.detail)
        return rep
    if rule == "six_tuple":
        return _six_tuple_separation(cert, sources, target, rep)
    if rule == "closed_set":
        return _closed_set_separation(cert, sources, target, rep, budget)
    if rule == "lie_ann":
        return lie_ann_separation(list(cert.sources), cert.target, cert, catalog)
    raise ValueError(rule)


def _fmt_rows(U: Subspace | None):
    from .algebra import format_vector

    if U is None:
        return []
    return [format_vector(r) for r in U.rows]


def _six_tuple_separation(cert, sources, target, rep):
    try:
        tt = six_tuple(target)
        tuples = [six_tuple(A) for A in sources]
    except NotStandardError as exc:
        rep.verdict = "failed"
        rep.diagnostics.append(str(exc))
        return rep
    forms = vanishing_forms(tuples)
    res = six_tuple_obstruction(forms, tt)
    rep.details["forms"] = [str(f) for f in forms]
    rep.details["target tuple"] = str(tt)
    if not res:
        rep.verdict = "failed"
        sigma, c = res.witnesses[0]
        rep.diagnostics.append(f"permutation {tuple(s + 1 for s in sigma)} with c = {c} satisfies every form")
    return rep


def _relabelled(A: AlgebraStructure, relabel) -> AlgebraStructure:
    if not relabel:
        return A
    n = A.dim
    E = ScalarMatrix.from_rows([[ONE if c == relabel[r] - 1 else ZERO for c in range(n)] for r in range(n)])
    return change_basis(A, E, A.label, inverse=E.transpose())


def _closed_set_separation(cert, sources, target, rep, budget):
    R = cert.closed_set
    st = borel_stability(R, budget)
    rep.details["stability"] = st
    if st != "stable":
        rep.verdict = "failed" if st == "not_stable" else "inconclusive"
        rep.diagnostics.append(f"closed set is {st} under lower-triangular matrices")
        return rep
    for A in sources:
        A2 = _relabelled(A, cert.relabel)
        if not closed_set_membership(A2, R):
            rep.verdict = "failed"
            rep.diagnostics.append(f"{A.label} (relabelled {cert.relabel}) is not in the closed set")
            return rep
    res = orbit_refute(target, R, "bruhat", budget, stability=st)
    rep.details["orbit"] = res.verdict
    rep.details["orbit method"] = res.method
    if res.exceptional:
        rep.details["orbit exceptional"] = [f"{w}: {v}" for w, v in res.exceptional]
    if res.verdict != "refuted":
        rep.verdict = "inconclusive" if res.verdict == "inconclusive" else "failed"
        rep.diagnostics.append(f"orbit of {target.label} not shown disjoint: {res.detail}")
    return rep


def lie_ann_separation(family: Sequence, B, cert: SeparationCertificate | None = None,
                       catalog: Catalog | None = None) -> SeparationReport:
    """Non-Lie families never reach a Lie algebra with zero annihilator."""
    restr = [_restrictions(A, catalog) for A in family]
    sources = [_structure(A, catalog) for A in family]
    B = _structure(B, catalog)
    rep = SeparationReport(cert, "lie_ann", "verified")
    if not is_lie(B):
        rep.verdict = "failed"
        rep.diagnostics.append(f"{B.label} is not a Lie algebra")
        return rep
    ann = _stratified(B, "ann")
    rep.details["target Ann"] = ann.generic
    if ann.strata:
        rep.details["target exceptional"] = ann.locus()
    if ann.generic != 0:
        rep.verdict = "failed"
        rep.diagnostics.append(f"Ann({B.label}) has dimension {ann.generic}")
        return rep
    for A, r in zip(sources, restr):
        vals = _dims_over_family(A, plus_square, r)
        rep.details[A.label] = vals
        for where, v in vals:
            if v == 0:
                rep.verdict = "failed"
                rep.diagnostics.append(f"{A.label} is Lie at {where}")
                return rep
        unresolved = _stratified(A, "plus_square").unresolved
        if unresolved:
            rep.verdict = "inconclusive"
            rep.diagnostics.append(f"{A.label}: unresolved constraints {list(unresolved)}")
            return rep
    return rep


_ORDER = {"verified": 0, "inconclusive": 1, "failed": 2}


def verify_separation(cert: SeparationCertificate, catalog: Catalog | None = None,
                      budget: Budget | None = None) -> SeparationReport:
    """Verify every (sources, target) assertion of the certificate; the worst verdict wins."""
    if len(cert.targets) == 1:
        return invariant_separation(cert, catalog, budget)
    out = SeparationReport(cert, cert.rule, "verified")
    for t in cert.targets:
        sub = invariant_separation(replace(cert, targets=(t,)), catalog, budget)
        out.details[t] = sub.details
        out.diagnostics.extend(f"{t}: {d}" for d in sub.diagnostics)
        if _ORDER[sub.verdict] > _ORDER[out.verdict]:
            out.verdict = sub.verdict
    return out
