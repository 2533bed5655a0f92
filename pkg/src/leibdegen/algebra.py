"""Algebra structures given by structure constants, and their basic calculus.

Indices are 0-based in the Python API (``c[i][j][k]`` is the coefficient of
``e_k`` in ``e_i e_j``) and 1-based in text, reports and defect keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .exactmath import MultiPoly, Scalar, ScalarMatrix, mat_solve, rref, S
from .exactmath.locus import merge_constraints, zero_set_bindings
from .exactmath.scalar import ONE, ZERO

__all__ = [
    "AlgebraStructure",
    "Subspace",
    "Stratum",
    "StratifiedDim",
    "DerivationReport",
    "leibniz_defect",
    "is_leibniz",
    "is_lie",
    "is_anticommutative",
    "act",
    "change_basis",
    "subspace_product",
    "annihilators",
    "plus_square",
    "square",
    "series",
    "is_nilpotent",
    "is_solvable",
    "derivation_dim",
    "stratify",
    "subspace_dim_stratified",
    "derivation_matrix",
    "format_vector",
]


def _vec_zero(n: int) -> tuple:
    return (ZERO,) * n


class AlgebraStructure:
    """An ``n``-dimensional algebra with Scalar structure constants."""

    __slots__ = ("dim", "params", "c", "label", "_hash")

    def __init__(self, dim: int, constants: Mapping | None = None, params: Sequence[str] = (), label: str = ""):
        n = dim
        table = [[list(_vec_zero(n)) for _ in range(n)] for _ in range(n)]
        for (i, j, k), v in (constants or {}).items():
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise IndexError(f"structure constant index ({i},{j},{k}) out of range for dim {n}")
            table[i][j][k] = S(v)
        self.dim = n
        self.c = tuple(tuple(tuple(v) for v in row) for row in table)
        used = sorted({g for row in self.c for v in row for x in v for g in x.gens})
        params = tuple(params)
        extra = [g for g in used if g not in params]
        if extra:
            raise ValueError(f"undeclared parameter(s) {', '.join(extra)} in {label or 'structure'}")
        self.params = params
        self.label = label
        self._hash = None

    @classmethod
    def from_table(cls, c, params: Sequence[str] = (), label: str = "") -> "AlgebraStructure":
        n = len(c)
        consts = {(i, j, k): c[i][j][k] for i in range(n) for j in range(n) for k in range(n) if c[i][j][k]}
        return cls(n, consts, params, label)

    @classmethod
    def zero(cls, n: int, label: str = "") -> "AlgebraStructure":
        return cls(n, {}, (), label or f"zero_{n}")

    def const(self, i: int, j: int, k: int) -> Scalar:
        """1-based accessor ``c_{i,j}^k``."""
        return self.c[i - 1][j - 1][k - 1]

    def constants(self) -> dict:
        """Nonzero constants keyed by 0-based ``(i, j, k)``."""
        n = self.dim
        return {(i, j, k): self.c[i][j][k] for i in range(n) for j in range(n) for k in range(n) if self.c[i][j][k]}

    def mul(self, x: Sequence, y: Sequence) -> tuple:
        n = self.dim
        out = [ZERO] * n
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if not y[j]:
                    continue
                f = x[i] * y[j]
                row = self.c[i][j]
                for k in range(n):
                    if row[k]:
                        out[k] = out[k] + f * row[k]
        return tuple(out)

    def basis_vector(self, i: int) -> tuple:
        return tuple(ONE if k == i else ZERO for k in range(self.dim))

    def specialize(self, bindings: Mapping[str, object], label: str | None = None) -> "AlgebraStructure":
        """Substitute parameters; unbound ones stay symbolic (and bound ones may introduce new names)."""
        b = {k: S(v) for k, v in bindings.items()}
        consts = {key: v.substitute(b) for key, v in self.constants().items()}
        names = [p for p in self.params if p not in b]
        for v in b.values():
            for g in v.gens:
                if g not in names:
                    names.append(g)
        return AlgebraStructure(self.dim, consts, tuple(names), label if label is not None else self.label)

    def with_label(self, label: str) -> "AlgebraStructure":
        return AlgebraStructure(self.dim, self.constants(), self.params, label)

    def variables(self) -> tuple:
        return tuple(sorted({g for v in self.constants().values() for g in v.gens}))

    def __eq__(self, other):
        return isinstance(other, AlgebraStructure) and self.dim == other.dim and self.c == other.c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.c))
        return self._hash

    def products(self) -> list:
        """Nonzero products as ``(i, j, vector)`` with 0-based indices."""
        n = self.dim
        return [(i, j, self.c[i][j]) for i in range(n) for j in range(n) if any(self.c[i][j])]

    def table_str(self) -> str:
        lines = []
        for i, j, v in self.products():
            lines.append(f"e{i + 1} e{j + 1} = {format_vector(v)}")
        return "\n".join(lines)

    def __repr__(self):
        body = "; ".join(f"e{i + 1}e{j + 1}={format_vector(v)}" for i, j, v in self.products())
        return f"AlgebraStructure({self.label or self.dim}: {body or '0'})"


def format_vector(v: Sequence[Scalar]) -> str:
    parts = []
    for k, x in enumerate(v):
        if not x:
            continue
        s = str(x)
        if x == 1:
            term = f"e{k + 1}"
        elif x == -1:
            term = f"-e{k + 1}"
        else:
            simple = all(ch.isalnum() or ch in "/^" for ch in s.lstrip("-"))
            term = f"{s} e{k + 1}" if simple else f"({s}) e{k + 1}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """Row space in reduced echelon form; generic over the parameters."""

    __slots__ = ("n", "rows", "pivots", "exceptional")

    def __init__(self, n: int, rows=(), pivots=(), exceptional=()):
        self.n = n
        self.rows = tuple(tuple(r) for r in rows)
        self.pivots = tuple(pivots)
        self.exceptional = tuple(exceptional)

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "Subspace":
        vecs = [tuple(S(x) for x in v) for v in vectors]
        vecs = [v for v in vecs if any(v)]
        if not vecs:
            return cls(n)
        R, piv, exc = rref(vecs, n)
        return cls(n, R, piv, exc)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls.coordinate(n, range(n))

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        rows = [tuple(ONE if k == i else ZERO for k in range(n)) for i in idx]
        return cls(n, rows, idx)

    @classmethod
    def tail(cls, n: int, i: int) -> "Subspace":
        """``S_i = <e_i, ..., e_n>`` with 1-based ``i``; ``i = n + 1`` gives 0."""
        return cls.coordinate(n, range(i - 1, n))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def contains(self, v: Sequence) -> bool:
        v = [S(x) for x in v]
        for r, p in zip(self.rows, self.pivots):
            f = v[p]
            if f:
                v = [a - f * b for a, b in zip(v, r)]
        return not any(v)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.rows) + list(other.rows), self.n)

    def substitute(self, bindings) -> "Subspace":
        return Subspace.span([[x.substitute(bindings) for x in r] for r in self.rows], self.n)

    def __repr__(self):
        if not self.rows:
            return "Subspace(0)"
        return "Subspace<" + ", ".join(format_vector(r) for r in self.rows) + ">"


# ---------------------------------------------------------------------------
# identities


def leibniz_defect(A: AlgebraStructure) -> dict:
    """Nonzero coordinates of ``(e_i e_j) e_l - (e_i e_l) e_j - e_i (e_j e_l)``.

    Keys are 1-based ``(i, j, l, k)``; an empty dict means the identity holds
    identically in the parameters.
    """
    n = A.dim
    c = A.c
    out = {}
    for i in range(n):
        for j in range(n):
            ij = c[i][j]
            for l in range(n):
                il = c[i][l]
                jl = c[j][l]
                for k in range(n):
                    acc = ZERO
                    for m in range(n):
                        if ij[m] and c[m][l][k]:
                            acc = acc + ij[m] * c[m][l][k]
                        if il[m] and c[m][j][k]:
                            acc = acc - il[m] * c[m][j][k]
                        if jl[m] and c[i][m][k]:
                            acc = acc - jl[m] * c[i][m][k]
                    if acc:
                        out[(i + 1, j + 1, l + 1, k + 1)] = acc
    return out


def is_leibniz(A: AlgebraStructure) -> bool:
    return not leibniz_defect(A)


def is_anticommutative(A: AlgebraStructure) -> bool:
    n = A.dim
    return all(not (A.c[i][j][k] + A.c[j][i][k]) for i in range(n) for j in range(i, n) for k in range(n))


def is_lie(A: AlgebraStructure) -> bool:
    return is_anticommutative(A) and is_leibniz(A)


# ---------------------------------------------------------------------------
# basis changes


def change_basis(A: AlgebraStructure, E: ScalarMatrix, label: str | None = None, inverse: ScalarMatrix | None = None) -> AlgebraStructure:
    """Structure constants of ``A`` in the basis whose ``i``-th vector is row ``i`` of ``E``."""
    n = A.dim
    if inverse is None:
        inverse = mat_solve(E, "inverse").inverse
    rows = [E.row(i) for i in range(n)]
    Einv = [inverse.row(m) for m in range(n)]
    prods = {}
    for i in range(n):
        for j in range(n):
            v = A.mul(rows[i], rows[j])
            if not any(v):
                continue
            new = [ZERO] * n
            for m in range(n):
                if v[m]:
                    r = Einv[m]
                    for k in range(n):
                        if r[k]:
                            new[k] = new[k] + v[m] * r[k]
            for k in range(n):
                if new[k]:
                    prods[(i, j, k)] = new[k]
    used = {g for v in prods.values() for g in v.gens}
    params = list(A.params) + sorted(g for g in used if g not in A.params)
    return AlgebraStructure(n, prods, tuple(params), A.label if label is None else label)


def act(g: ScalarMatrix, A: AlgebraStructure, label: str | None = None) -> AlgebraStructure:
    """``(g*mu)(x, y) = g mu(g^-1 x, g^-1 y)``."""
    ginv = mat_solve(g, "inverse").inverse
    return change_basis(A, ginv.transpose(), label, inverse=g.transpose())


# ---------------------------------------------------------------------------
# subspace calculus


def subspace_product(A: AlgebraStructure, U: Subspace, W: Subspace) -> Subspace:
    vecs = [A.mul(u, w) for u in U.rows for w in W.rows]
    return Subspace.span(vecs, A.dim)


def square(A: AlgebraStructure) -> Subspace:
    whole = Subspace.whole(A.dim)
    return subspace_product(A, whole, whole)


def plus_square(A: AlgebraStructure) -> Subspace:
    n = A.dim
    vecs = [tuple(a + b for a, b in zip(A.c[i][j], A.c[j][i])) for i in range(n) for j in range(i, n)]
    return Subspace.span(vecs, n)


def _kernel_space(rows: list, n: int) -> Subspace:
    if not rows:
        return Subspace.whole(n)
    res = mat_solve(ScalarMatrix.from_rows(rows), "kernel_basis")
    sp = Subspace.span(res.kernel, n)
    return Subspace(n, sp.rows, sp.pivots, merge_constraints(list(res.exceptional) + list(sp.exceptional)))


def _ann_rows(A: AlgebraStructure, left: bool) -> list:
    n = A.dim
    rows = []
    for j in range(n):
        for k in range(n):
            if left:
                r = [A.c[i][j][k] for i in range(n)]
            else:
                r = [A.c[j][i][k] for i in range(n)]
            if any(r):
                rows.append(r)
    return rows


def annihilators(A: AlgebraStructure):
    """``(Ann_L, Ann_R, Ann)`` with ``Ann_L = {x : xv = 0}``, ``Ann_R = {x : vx = 0}``."""
    n = A.dim
    left = _ann_rows(A, True)
    right = _ann_rows(A, False)
    return _kernel_space(left, n), _kernel_space(right, n), _kernel_space(left + right, n)


def series(A: AlgebraStructure, kind: str = "lower_central", max_len: int | None = None) -> list:
    """Descending chain starting at ``A`` (lower central) or ``A^2`` (derived), until it stabilizes."""
    n = A.dim
    whole = Subspace.whole(n)
    if kind == "lower_central":
        chain = [whole]
        nxt = lambda X: subspace_product(A, whole, X) + subspace_product(A, X, whole)
    elif kind == "derived":
        chain = [square(A)]
        nxt = lambda X: subspace_product(A, X, X)
    else:
        raise ValueError(f"unknown series kind {kind!r}")
    limit = max_len if max_len is not None else n + 2
    while len(chain) < limit:
        X = chain[-1]
        if X.dim == 0:
            break
        Y = nxt(X)
        if Y.dim == X.dim:
            break
        chain.append(Y)
    return chain


def is_nilpotent(A: AlgebraStructure) -> bool:
    return series(A, "lower_central")[-1].dim == 0


def is_solvable(A: AlgebraStructure) -> bool:
    return series(A, "derived")[-1].dim == 0


# ---------------------------------------------------------------------------
# stratification over parameter values


@dataclass(frozen=True)
class Stratum:
    """Parameter values (given by substitutions) where a computed dimension differs."""

    constraint: str
    bindings: tuple
    value: object
    free: tuple = ()

    def bindings_dict(self) -> dict:
        return dict(self.bindings)


@dataclass(frozen=True)
class StratifiedDim:
    generic: object
    strata: tuple = ()
    unresolved: tuple = ()

    @property
    def values(self) -> set:
        return {self.generic} | {s.value for s in self.strata}

    def locus(self) -> list[str]:
        out = []
        for s in self.strata:
            if s.constraint not in out:
                out.append(s.constraint)
        return out


def _binding_text(b: Mapping) -> str:
    return ", ".join(f"{k} = {v}" for k, v in sorted(b.items()))


def stratify(A: AlgebraStructure, compute: Callable, depth: int | None = None) -> StratifiedDim:
    """Evaluate ``compute(A) -> (value, candidate_polys)`` generically and on its exceptional locus.

    Every candidate factor is solved to substitutions, the computation is
    repeated there (recursively, so intersections are visited) and a stratum
    is recorded whenever the value differs from the generic one.
    """
    if depth is None:
        depth = len(A.variables())
    generic, cands = compute(A)
    strata: list[Stratum] = []
    unresolved: list[str] = []
    seen: set = set()

    def visit(B, cands, prefix: dict, level: int):
        if level <= 0:
            return
        for f in merge_constraints(cands):
            sols = zero_set_bindings(f)
            if sols is None:
                txt = str(f) + (f" [{_binding_text(prefix)}]" if prefix else "")
                if txt not in unresolved:
                    unresolved.append(txt)
                continue
            for sol in sols:
                full = {**{k: v.substitute(sol) for k, v in prefix.items()}, **sol}
                key = _binding_text(full)
                if key in seen:
                    continue
                seen.add(key)
                try:
                    C = B.specialize(sol)
                except ArithmeticError:
                    continue
                val, sub = compute(C)
                if val != generic:
                    strata.append(Stratum(key, tuple(sorted(full.items())), val, C.variables()))
                visit(C, sub, full, level - 1)

    visit(A, cands, {}, depth)
    strata.sort(key=lambda s: (len(s.bindings), s.constraint))
    return StratifiedDim(generic, tuple(strata), tuple(unresolved))


@dataclass(frozen=True)
class DerivationReport:
    generic_dim: int
    exceptional_locus: tuple = ()
    unresolved: tuple = ()

    @property
    def min_dim(self) -> int:
        return min([self.generic_dim] + [s.value for s in self.exceptional_locus])

    @property
    def max_dim(self) -> int:
        return max([self.generic_dim] + [s.value for s in self.exceptional_locus])


def derivation_matrix(A: AlgebraStructure) -> list:
    """Rows of the linear system for ``d`` with ``d(e_a) = sum_b d[a][b] e_b``."""
    n = A.dim
    c = A.c
    rows = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r = [ZERO] * (n * n)
                # d(e_i e_j)_k
                for m in range(n):
                    if c[i][j][m]:
                        r[m * n + k] = r[m * n + k] + c[i][j][m]
                # - d(e_i) e_j
                for p in range(n):
                    if c[p][j][k]:
                        r[i * n + p] = r[i * n + p] - c[p][j][k]
                # - e_i d(e_j)
                for q in range(n):
                    if c[i][q][k]:
                        r[j * n + q] = r[j * n + q] - c[i][q][k]
                if any(r):
                    rows.append(r)
    return rows


def _der_compute(A: AlgebraStructure):
    n = A.dim
    rows = derivation_matrix(A)
    if not rows:
        return n * n, []
    res = mat_solve(ScalarMatrix.from_rows(rows), "rank")
    return n * n - res.rank, list(res.exceptional)


def derivation_dim(A: AlgebraStructure) -> DerivationReport:
    sd = stratify(A, _der_compute)
    return DerivationReport(sd.generic, sd.strata, sd.unresolved)


def subspace_dim_stratified(A: AlgebraStructure, fn: Callable[[AlgebraStructure], Subspace]) -> StratifiedDim:
    """Dimension of ``fn(A)`` generically and at every parameter value where it jumps."""

    def compute(B):
        U = fn(B)
        return U.dim, list(U.exceptional)

    return stratify(A, compute)
