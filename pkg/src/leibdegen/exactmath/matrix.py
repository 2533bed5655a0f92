"""Matrices over the rational-function field and fraction-field elimination."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .locus import merge_constraints
from .poly import MultiPoly
from .scalar import Scalar, S, ZERO, ONE

__all__ = ["ScalarMatrix", "SolveResult", "mat_solve", "rref", "SingularMatrixError"]


class SingularMatrixError(ArithmeticError):
    pass


class ScalarMatrix:
    """Dense row-major matrix of Scalars."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        self.rows = rows
        self.cols = cols
        self.entries = tuple(S(x) for x in entries)
        if len(self.entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ScalarMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def identity(cls, n: int) -> "ScalarMatrix":
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "ScalarMatrix":
        n = len(values)
        return cls(n, n, [S(values[i]) if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "ScalarMatrix":
        """Matrix sending ``e_j`` to ``e_perm[j]`` (column convention)."""
        n = len(perm)
        return cls(n, n, [ONE if i == perm[j] else ZERO for i in range(n) for j in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    if r[k]:
                        b = other[k, j]
                        if b:
                            acc = acc + r[k] * b
                out.append(acc)
        return ScalarMatrix(self.rows, other.cols, out)

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector."""
        return tuple(sum((self[i, j] * v[j] for j in range(self.cols) if v[j]), ZERO) for i in range(self.rows))

    def map(self, fn) -> "ScalarMatrix":
        return ScalarMatrix(self.rows, self.cols, [fn(x) for x in self.entries])

    def substitute(self, bindings) -> "ScalarMatrix":
        return self.map(lambda x: x.substitute(bindings))

    def variables(self) -> tuple:
        return tuple(sorted({v for x in self.entries for v in x.gens}))

    def det(self) -> Scalar:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        rows = self.to_rows()
        n = self.rows
        det = ONE
        for c in range(n):
            p = _choose_pivot(rows, c, c)
            if p is None:
                return ZERO
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                det = -det
            piv = rows[c][c]
            det = det * piv
            inv = piv.inverse()
            for r in range(c + 1, n):
                f = rows[r][c]
                if f:
                    f = f * inv
                    rows[r] = [a - f * b if b else a for a, b in zip(rows[r], rows[c])]
        return det

    def __eq__(self, other):
        return isinstance(other, ScalarMatrix) and (self.rows, self.cols, self.entries) == (
            other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return "ScalarMatrix([" + ", ".join("[" + ", ".join(str(x) for x in self.row(i)) + "]"
                                            for i in range(self.rows)) + "])"


def _complexity(x: Scalar):
    n = x.numerator
    return (0 if x.is_constant() else 1, len(n.dict) + len(x.denominator.dict), n.total_degree())


def _choose_pivot(rows, r0: int, c: int):
    best, best_key = None, None
    for r in range(r0, len(rows)):
        x = rows[r][c]
        if x:
            k = _complexity(x)
            if best is None or k < best_key:
                best, best_key = r, k
                if k[0] == 0:
                    break
    return best


@dataclass(frozen=True)
class SolveResult:
    rank: int
    pivots: tuple
    rref: tuple
    kernel: tuple = ()
    inverse: ScalarMatrix | None = None
    exceptional: tuple = field(default=())

    @property
    def nullity(self) -> int:
        return len(self.kernel)


def rref(rows: Sequence[Sequence[Scalar]], ncols: int | None = None):
    """Reduced row echelon form over the fraction field.

    Returns ``(rref_rows, pivot_columns, exceptional)`` where ``exceptional``
    lists the numerators of non-constant pivots and denominators of input
    entries: off their zero sets the pivot pattern is the generic one.
    """
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    watch: list[MultiPoly] = []
    for r in rows:
        for x in r:
            if x and not x.is_polynomial():
                watch.append(x.denominator)
    pivots = []
    pr = 0
    for c in range(ncols):
        if pr >= len(rows):
            break
        p = _choose_pivot(rows, pr, c)
        if p is None:
            continue
        rows[pr], rows[p] = rows[p], rows[pr]
        piv = rows[pr][c]
        if not piv.is_constant():
            watch.append(piv.numerator)
        inv = piv.inverse()
        rows[pr] = [x * inv if x else x for x in rows[pr]]
        base = rows[pr]
        for r in range(len(rows)):
            if r != pr:
                f = rows[r][c]
                if f:
                    rows[r] = [a - f * b if b else a for a, b in zip(rows[r], base)]
        pivots.append(c)
        pr += 1
    return [tuple(r) for r in rows[:pr]], tuple(pivots), tuple(merge_constraints(watch))


def mat_solve(M: ScalarMatrix, mode: str = "rank") -> SolveResult:
    """Rank, kernel basis (``kernel_basis``) or ``inverse`` of ``M``.

    The result always carries the exceptional parameter locus: polynomial
    constraints ``p = 0`` outside of which the computed pivot pattern holds.
    """
    if mode not in ("rank", "kernel_basis", "inverse"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "inverse":
        if M.rows != M.cols:
            raise SingularMatrixError("inverse of a non-square matrix")
        n = M.rows
        aug = [list(M.row(i)) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        R, piv, exc = rref(aug, n)
        if len(piv) < n or piv != tuple(range(n)):
            raise SingularMatrixError("matrix is singular")
        inv = ScalarMatrix(n, n, [x for r in R for x in r[n:]])
        return SolveResult(n, piv, tuple(tuple(r[:n]) for r in R), (), inv, exc)
    R, piv, exc = rref(M.to_rows(), M.cols)
    kern = ()
    if mode == "kernel_basis":
        vecs = []
        pset = set(piv)
        for f in range(M.cols):
            if f in pset:
                continue
            v = [ZERO] * M.cols
            v[f] = ONE
            for r, pc in enumerate(piv):
                if R[r][f]:
                    v[pc] = -R[r][f]
            vecs.append(tuple(v))
        kern = tuple(vecs)
    return SolveResult(len(piv), piv, tuple(R), kern, None, exc)
