"""Existence of subspaces with polynomial-definable properties.

Every ``k``-dimensional subspace of ``Q(i)^n`` has a unique basis in reduced
echelon form; the pivot set picks an echelon cell and the remaining entries
are free unknowns.  A property is compiled to polynomial equations in those
unknowns (and in the algebra's parameters), and each cell is decided with a
Groebner basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import AlgebraStructure, Subspace, is_nilpotent, subspace_product
from .exactmath import Budget, MultiPoly, PolyIdeal, Scalar, eliminate, find_point, groebner, ideal_query
from .exactmath.scalar import ONE, ZERO

__all__ = [
    "EchelonCell",
    "SubspaceProperty",
    "SubspaceResult",
    "enumerate_cells",
    "exists_subspace",
    "max_dim_subspace",
    "nilradical_dim",
    "check_property",
    "TRIVIAL",
    "NILPOTENT_IDEAL",
    "anticommutative",
]


@dataclass(frozen=True)
class EchelonCell:
    n: int
    k: int
    pivots: tuple
    free: tuple  # ((row, col, name), ...)

    def basis(self) -> list[list[Scalar]]:
        rows = [[ZERO] * self.n for _ in range(self.k)]
        for r, p in enumerate(self.pivots):
            rows[r][p] = ONE
        for r, c, name in self.free:
            rows[r][c] = Scalar.var(name)
        return rows

    def names(self) -> tuple:
        return tuple(name for _, _, name in self.free)

    def point(self, values: dict) -> Subspace:
        rows = self.basis()
        rows = [[x.substitute(values) for x in r] for r in rows]
        return Subspace.span(rows, self.n)


def enumerate_cells(n: int, k: int) -> list[EchelonCell]:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    cells = []
    for piv in itertools.combinations(range(n), k):
        free = []
        pset = set(piv)
        for r, p in enumerate(piv):
            for c in range(p + 1, n):
                if c not in pset:
                    free.append((r, c, f"u{r + 1}_{c + 1}"))
        cells.append(EchelonCell(n, k, piv, tuple(free)))
    return cells


@dataclass(frozen=True)
class SubspaceProperty:
    tag: str
    bound: int | None = None

    def __str__(self):
        if self.tag == "anticommutative_with_image_bound":
            return f"anticommutative subalgebra with dim(A D) <= {self.bound}"
        return self.tag.replace("_", " ")


TRIVIAL = SubspaceProperty("trivial")
NILPOTENT_IDEAL = SubspaceProperty("nilpotent_ideal")


def anticommutative(m: int) -> SubspaceProperty:
    return SubspaceProperty("anticommutative_with_image_bound", m)


@dataclass(frozen=True)
class SubspaceResult:
    answer: str  # yes | no | inconclusive
    witness: Subspace | None = None
    at: tuple = ()  # parameter values the witness needs, if any
    detail: str = ""
    exceptional: tuple = ()  # generic "no": polynomials in the parameters where solutions may exist

    def __bool__(self):
        return self.answer == "yes"


# ---------------------------------------------------------------------------
# property compilation


def _coords_in(v: Sequence[Scalar], rows, pivots) -> tuple[list, list]:
    """Coordinates of ``v`` against an echelon basis and the residual (zero iff v in span)."""
    coeffs = [v[p] for p in pivots]
    resid = list(v)
    for c, r in zip(coeffs, rows):
        if c:
            resid = [a - c * b for a, b in zip(resid, r)]
    return coeffs, resid


def _minors(mat: list[list[Scalar]], size: int) -> Iterable[Scalar]:
    from .exactmath import ScalarMatrix

    nr, nc = len(mat), len(mat[0]) if mat else 0
    if size > min(nr, nc):
        return
    nonzero_rows = [i for i in range(nr) if any(mat[i])]
    for rs in itertools.combinations(nonzero_rows, size):
        for cs in itertools.combinations(range(nc), size):
            sub = ScalarMatrix.from_rows([[mat[i][j] for j in cs] for i in rs])
            d = sub.det()
            if d:
                yield d


def _restricted_products(A: AlgebraStructure, rows, pivots):
    k = len(rows)
    gamma = {}
    for r in range(k):
        for s in range(k):
            v = A.mul(rows[r], rows[s])
            gamma[(r, s)] = [v[p] for p in pivots]
    return gamma


def _nilpotency_equations(gamma: dict, k: int, depth: int) -> list[Scalar]:
    """Coordinates of all iterated one-sided products of length ``depth`` in the restricted algebra."""
    def mul(x, y):
        out = [ZERO] * k
        for r in range(k):
            if not x[r]:
                continue
            for s in range(k):
                if not y[s]:
                    continue
                f = x[r] * y[s]
                g = gamma[(r, s)]
                for q in range(k):
                    if g[q]:
                        out[q] = out[q] + f * g[q]
        return out

    basis = [[ONE if q == r else ZERO for q in range(k)] for r in range(k)]
    level = {tuple(b) for b in basis}
    for _ in range(depth - 1):
        nxt = set()
        for x in level:
            for b in basis:
                for v in (mul(list(x), b), mul(b, list(x))):
                    if any(v):
                        nxt.add(tuple(v))
        level = nxt
        if not level:
            return []
    return [c for v in level for c in v if c]


def compile_property(A: AlgebraStructure, rows, pivots, prop: SubspaceProperty) -> list[Scalar]:
    """Polynomial conditions (as Scalars) on the basis ``rows`` expressing ``prop``."""
    k = len(rows)
    n = A.dim
    eqs: list[Scalar] = []
    if prop.tag == "trivial":
        for r in range(k):
            for s in range(k):
                eqs.extend(x for x in A.mul(rows[r], rows[s]) if x)
    elif prop.tag == "anticommutative_with_image_bound":
        for r in range(k):
            for s in range(r, k):
                v = A.mul(rows[r], rows[s])
                w = A.mul(rows[s], rows[r])
                eqs.extend(x + y for x, y in zip(v, w) if x + y)
                _, resid = _coords_in(v, rows, pivots)
                eqs.extend(x for x in resid if x)
        image = []
        for i in range(n):
            e = A.basis_vector(i)
            for r in range(k):
                v = A.mul(e, rows[r])
                if any(v):
                    image.append(list(v))
        m = prop.bound or 0
        if image:
            if m == 0:
                eqs.extend(x for v in image for x in v if x)
            else:
                eqs.extend(_minors(image, m + 1))
    elif prop.tag == "nilpotent_ideal":
        for i in range(n):
            e = A.basis_vector(i)
            for r in range(k):
                for v in (A.mul(e, rows[r]), A.mul(rows[r], e)):
                    _, resid = _coords_in(v, rows, pivots)
                    eqs.extend(x for x in resid if x)
        gamma = _restricted_products(A, rows, pivots)
        eqs.extend(_nilpotency_equations(gamma, k, k + 1))
    else:
        raise ValueError(f"unknown subspace property {prop.tag!r}")
    return eqs


def check_property(A: AlgebraStructure, U: Subspace, prop: SubspaceProperty) -> bool:
    """Independent re-check of a witness with the algebra_core primitives."""
    n = A.dim
    if prop.tag == "trivial":
        return subspace_product(A, U, U).dim == 0
    if prop.tag == "anticommutative_with_image_bound":
        for r in U.rows:
            for s in U.rows:
                if any(x + y for x, y in zip(A.mul(r, s), A.mul(s, r))):
                    return False
        if not subspace_product(A, U, U) <= U:
            return False
        return subspace_product(A, Subspace.whole(n), U).dim <= (prop.bound or 0)
    if prop.tag == "nilpotent_ideal":
        whole = Subspace.whole(n)
        if not (subspace_product(A, whole, U) <= U and subspace_product(A, U, whole) <= U):
            return False
        # lower central series of the restricted structure
        X = U
        for _ in range(U.dim + 1):
            if X.dim == 0:
                return True
            Y = subspace_product(A, U, X) + subspace_product(A, X, U)
            if Y.dim == X.dim:
                return False
            X = Y
        return X.dim == 0
    raise ValueError(prop.tag)


# ---------------------------------------------------------------------------
# solving


def _to_polys(eqs: list[Scalar], names: Sequence[str]) -> list[MultiPoly]:
    out = []
    seen = set()
    for e in eqs:
        p = e.numerator
        key = str(p.monic()) if not p.is_constant() else "1"
        if key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out


def _coordinate_witness(A: AlgebraStructure, k: int, prop: SubspaceProperty):
    """Fast path: coordinate subspaces that have the property identically in the parameters."""
    n = A.dim
    for idx in sorted(itertools.combinations(range(n), k), key=lambda c: tuple(-x for x in c)):
        U = Subspace.coordinate(n, idx)
        if check_property(A, U, prop):
            return U
    return None


def exists_subspace(A: AlgebraStructure, k: int, prop: SubspaceProperty, mode: str = "all",
                    budget: Budget | None = None) -> SubspaceResult:
    """Decide whether ``A`` has a ``k``-dimensional subspace with ``prop``.

    ``mode="all"`` treats the algebra's parameters as unknowns too: ``no``
    then means no subspace exists for any parameter value, and a ``yes``
    witness may pin parameter values (reported in ``at``).  ``mode="identical"``
    only accepts witnesses valid identically in the parameters.
    ``mode="generic"`` answers for generic parameter values: ``no`` then
    lists, in ``exceptional``, nonzero polynomials in the parameters off
    whose zero set no subspace exists.
    """
    n = A.dim
    if k == 0:
        return SubspaceResult("yes", Subspace.zero(n))
    U = _coordinate_witness(A, k, prop)
    if U is not None:
        return SubspaceResult("yes", U, (), "coordinate subspace")
    params = A.variables()
    inconclusive = False
    candidates = []
    for cell in enumerate_cells(n, k):
        rows = cell.basis()
        eqs = compile_property(A, rows, cell.pivots, prop)
        names = cell.names()
        gens = tuple(names) + tuple(params)
        polys = _to_polys(eqs, gens)
        if not polys:
            W = Subspace.span(rows, n) if not names else cell.point({v: ZERO for v in names})
            if check_property(A, W, prop):
                return SubspaceResult("yes", W, (), f"cell {cell.pivots}")
            continue
        ideal = PolyIdeal(polys, gens)
        gb = groebner(ideal, budget)
        q = ideal_query(gb, "is_unit")
        if q.answer is True:
            continue
        if q.answer is None:
            inconclusive = True
            continue
        candidates.append((cell, ideal))
    # witness extraction: identically valid first, then with pinned parameters
    for cell, ideal in candidates:
        names = cell.names()
        pt = _identical_point(A, cell, prop)
        if pt is not None:
            W = cell.point(pt)
            return SubspaceResult("yes", W, (), f"cell {cell.pivots}")
    if mode == "generic" and params and candidates:
        exc = []
        for cell, ideal in candidates:
            el = eliminate(ideal, cell.names(), budget)
            polys = [g for g in el.basis.generators if g]
            if not el.complete or not polys:
                break
            exc.append(polys[0])
        else:
            return SubspaceResult("no", None, (), "no solution for generic parameters", tuple(exc))
    if mode == "identical" and params:
        if candidates:
            return SubspaceResult("inconclusive", None, (), "solutions exist only for special or non-constant data")
    for cell, ideal in candidates:
        pt = find_point(ideal, budget)
        if pt is None:
            continue
        at = tuple(sorted((p, Scalar(pt[p])) for p in params if p in pt))
        B = A.specialize(dict(at)) if at else A
        W = cell.point({v: Scalar(pt[v]) for v in cell.names() if v in pt})
        if check_property(B, W, prop):
            if mode == "identical" and at:
                continue
            return SubspaceResult("yes", W, at, f"cell {cell.pivots}")
    if candidates:
        return SubspaceResult("inconclusive", None, (), "solvable cell without a Q(i) witness")
    if inconclusive:
        return SubspaceResult("inconclusive", None, (), "Groebner budget exhausted")
    return SubspaceResult("no")


_SMALL = [0, 1, -1, 2, -2]


def _identical_point(A: AlgebraStructure, cell: EchelonCell, prop: SubspaceProperty):
    """Small constant values for the free entries that satisfy ``prop`` identically in the parameters."""
    names = cell.names()
    if len(names) > 4:
        return None
    for vals in itertools.product(_SMALL, repeat=len(names)):
        pt = {v: Scalar(x) for v, x in zip(names, vals)}
        W = cell.point(pt)
        if W.dim == cell.k and check_property(A, W, prop):
            return pt
    return None


def max_dim_subspace(A: AlgebraStructure, prop: SubspaceProperty, mode: str = "all",
                     budget: Budget | None = None) -> tuple:
    """Largest ``k`` with a witness; returns ``(k, result)`` or ``(None, result)`` if undecided."""
    for k in range(A.dim, -1, -1):
        res = exists_subspace(A, k, prop, mode, budget)
        if res.answer == "yes":
            return k, res
        if res.answer == "inconclusive":
            return None, res
    return 0, SubspaceResult("yes", Subspace.zero(A.dim))


def nilradical_dim(A: AlgebraStructure, budget: Budget | None = None) -> int:
    """Dimension of the largest nilpotent ideal (identically in the parameters)."""
    from .algebra import is_solvable

    if not is_solvable(A):
        raise ValueError(f"{A.label or 'algebra'} is not solvable")
    k, res = max_dim_subspace(A, NILPOTENT_IDEAL, "identical", budget)
    if k is None:
        raise ArithmeticError(f"nilradical undecided: {res.detail}")
    return k
