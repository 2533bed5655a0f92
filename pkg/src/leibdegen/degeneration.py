"""Degeneration certificates: parametrized bases and indices, checked exactly at t = 0.

Certificate file format::

    source: L_4^a
    target: L_5
    index: a = t - 1
    basis:
      1, 0, 0, 1
      0, 1, 0, 0
      0, 0, t, 0
      0, 0, 0, t

Row ``i`` of the basis holds the coordinates of ``E_i`` in the source basis.
Index lines bind source parameters to expressions in ``t`` and the target
parameters; unbound source parameters must not occur.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraStructure, change_basis
from .catalog import Catalog, CatalogEntry, CatalogParseError, builtin_catalog
from .exactmath import ExceptionalValueError, MultiPoly, Scalar, ScalarMatrix, ScalarParseError, mat_solve, parse_scalar
from .exactmath.locus import merge_constraints, zero_set_bindings
from .exactmath.scalar import ZERO

__all__ = [
    "DegenerationCertificate",
    "DegenerationReport",
    "BrokenChainError",
    "ClosureRelation",
    "parse_certificate",
    "serialize_certificate",
    "specialize_family",
    "transport",
    "verify_degeneration",
    "closure_chain",
    "compose_chain",
    "zero_certificate",
]

T = "t"


@dataclass(frozen=True)
class DegenerationCertificate:
    source: str
    target: str
    basis: ScalarMatrix
    index: tuple = ()
    name: str = ""
    note: str = ""

    def index_dict(self) -> dict:
        return dict(self.index)

    def __str__(self):
        return self.name or f"{self.source} -> {self.target}"


def _split_row(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    return [p for p in parts if p]


def parse_certificate(text: str, source: str = "") -> DegenerationCertificate:
    """Parse a degeneration certificate; errors carry 1-based line and column."""
    src = tgt = note = ""
    index: list[tuple[str, Scalar]] = []
    rows: list[list[Scalar]] = []
    in_basis = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        key, sep, value = stripped.partition(":")
        key_l = key.strip().lower()
        if sep and key_l in ("source", "target", "index", "basis", "note"):
            in_basis = False
            col = line.index(":") + 2
            if key_l == "source":
                src = value.strip()
            elif key_l == "target":
                tgt = value.strip()
            elif key_l == "note":
                note = (note + " " + value.strip()).strip()
            elif key_l == "basis":
                in_basis = True
                if value.strip():
                    raise CatalogParseError("basis rows go on the following lines", lineno, col, source)
            else:
                name, eq, expr = value.partition("=")
                if not eq or not name.strip():
                    raise CatalogParseError("index line must read 'param = expression'", lineno, col, source)
                try:
                    val = parse_scalar(expr, None, lineno)
                except ScalarParseError as exc:
                    off = line.index("=") + 1
                    raise CatalogParseError(str(exc).split(" at ")[0], lineno, off + exc.pos + 1, source) from None
                index.append((name.strip(), val))
            continue
        if not in_basis:
            raise CatalogParseError(f"unexpected line {stripped!r}", lineno, len(line) - len(line.lstrip()) + 1, source)
        row = []
        offset = 0
        for part in line.split(","):
            if part.strip():
                try:
                    row.append(parse_scalar(part, None, lineno))
                except ScalarParseError as exc:
                    raise CatalogParseError(str(exc).split(" at ")[0], lineno, offset + exc.pos + 1, source) from None
            offset += len(part) + 1
        rows.append(row)
    if not src or not tgt:
        raise CatalogParseError("certificate needs 'source:' and 'target:'", 1, 1, source)
    if not rows:
        raise CatalogParseError("certificate needs a 'basis:' block", 1, 1, source)
    n = len(rows)
    for k, r in enumerate(rows):
        if len(r) != n:
            raise CatalogParseError(f"basis row {k + 1} has {len(r)} entries, expected {n}", 1, 1, source)
    name = source.rsplit("/", 1)[-1].rsplit(".", 1)[0] if source else f"{src} -> {tgt}"
    return DegenerationCertificate(src, tgt, ScalarMatrix.from_rows(rows), tuple(index), name, note)


def serialize_certificate(cert: DegenerationCertificate) -> str:
    lines = [f"source: {cert.source}", f"target: {cert.target}"]
    if cert.note:
        lines.append(f"note: {cert.note}")
    for p, v in cert.index:
        lines.append(f"index: {p} = {v}")
    lines.append("basis:")
    for i in range(cert.basis.rows):
        lines.append("  " + ", ".join(str(x) for x in cert.basis.row(i)))
    return "\n".join(lines) + "\n"


def zero_certificate(label: str, n: int = 4) -> DegenerationCertificate:
    """The canonical ``E_i = t e_i`` certificate degenerating anything to the zero algebra."""
    t = Scalar.var(T)
    return DegenerationCertificate(label, f"zero_{n}", ScalarMatrix.diag([t] * n), (), f"{label}-zero")


def specialize_family(A: AlgebraStructure, bindings: Mapping[str, object]) -> AlgebraStructure:
    return A.specialize(bindings)


def _resolve(label_or_structure, catalog: Catalog | None) -> tuple[AlgebraStructure, tuple]:
    if isinstance(label_or_structure, AlgebraStructure):
        return label_or_structure, ()
    if isinstance(label_or_structure, CatalogEntry):
        return label_or_structure.structure, label_or_structure.restrictions
    label = label_or_structure
    if label.startswith("zero_"):
        return AlgebraStructure.zero(int(label.split("_", 1)[1]), label), ()
    cat = catalog or builtin_catalog()
    e = cat.get(label)
    return e.structure, e.restrictions


def transport(cert: DegenerationCertificate, source: AlgebraStructure | None = None,
              catalog: Catalog | None = None) -> AlgebraStructure:
    """Structure constants of the specialized source in the basis ``E_1^t, ..., E_n^t``."""
    if source is None:
        source, _ = _resolve(cert.source, catalog)
    fam = specialize_family(source, cert.index_dict())
    res = mat_solve(cert.basis, "inverse")
    return change_basis(fam, cert.basis, label=f"{cert.source} in E^t", inverse=res.inverse)


@dataclass(frozen=True)
class ExceptionalCheck:
    bindings: tuple
    verdict: str
    detail: str = ""


@dataclass(frozen=True)
class DegenerationReport:
    certificate: DegenerationCertificate
    verdict: str
    transported: AlgebraStructure | None = None
    exceptional_t: tuple = ()
    exceptional_target: tuple = ()
    exceptional_checks: tuple = ()
    diagnostics: tuple = ()

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"

    def to_dict(self) -> dict:
        return {
            "certificate": str(self.certificate),
            "source": self.certificate.source,
            "target": self.certificate.target,
            "verdict": self.verdict,
            "exceptional_t": [str(p) for p in self.exceptional_t],
            "exceptional_target": [str(p) for p in self.exceptional_target],
            "exceptional_checks": [
                {"at": {k: str(v) for k, v in c.bindings}, "verdict": c.verdict, "detail": c.detail}
                for c in self.exceptional_checks
            ],
            "diagnostics": list(self.diagnostics),
        }


def _limit_check(moved: AlgebraStructure, target: AlgebraStructure) -> list[str]:
    n = target.dim
    problems = []
    zero_t = {T: ZERO}
    for i, j, k in itertools.product(range(n), repeat=3):
        c = moved.c[i][j][k]
        want = target.c[i][j][k]
        try:
            got = c.substitute(zero_t)
        except ExceptionalValueError:
            problems.append(f"c_{i + 1}{j + 1}^{k + 1} = {c} has a pole at t = 0")
            continue
        if got != want:
            problems.append(f"c_{i + 1}{j + 1}^{k + 1}(0) = {got}, expected {want}")
    return problems


def _t_factors(p: MultiPoly) -> tuple[list, list]:
    """Split a polynomial constraint into factors involving ``t`` and factors free of it."""
    with_t, without = [], []
    for f in merge_constraints([p]):
        (with_t if T in f.variables() else without).append(f)
    return with_t, without


def _content_wrt_t(p: MultiPoly) -> MultiPoly | None:
    """gcd of the coefficients of ``p`` viewed as a polynomial in ``t`` (None if p is free of t)."""
    if T not in p.gens:
        return None
    k = p.gens.index(T)
    coeffs: dict = {}
    for m, c in p.dict.items():
        mm = m[:k] + (0,) + m[k + 1:]
        coeffs.setdefault(m[k], {})[mm] = c
    g = None
    for d in coeffs.values():
        q = MultiPoly._raw(p.gens, d)
        g = q if g is None else g.gcd(q)
    return g


def verify_degeneration(cert: DegenerationCertificate, catalog: Catalog | None = None,
                        source: AlgebraStructure | None = None, target: AlgebraStructure | None = None,
                        check_exceptional: bool = True) -> DegenerationReport:
    """Exact check that the transported constants are regular at ``t = 0`` with the target as limit."""
    src_restr: tuple = ()
    if source is None:
        source, src_restr = _resolve(cert.source, catalog)
    if target is None:
        target, _ = _resolve(cert.target, catalog)
    diags: list[str] = []
    if cert.basis.rows != source.dim or cert.basis.cols != source.dim or target.dim != source.dim:
        return DegenerationReport(cert, "failed", diagnostics=("dimension mismatch",))
    bound = {p for p, _ in cert.index}
    missing = [p for p in source.variables() if p not in bound]
    if missing:
        return DegenerationReport(cert, "failed", diagnostics=(f"source parameter(s) {', '.join(missing)} not bound by the index",))
    allowed = set(target.params) | {T}
    stray = sorted({g for x in cert.basis.entries for g in x.gens} | {g for _, v in cert.index for g in v.gens})
    stray = [g for g in stray if g not in allowed]
    if stray:
        return DegenerationReport(cert, "failed", diagnostics=(f"unknown name(s) {', '.join(stray)} in certificate",))
    det = cert.basis.det()
    if not det:
        return DegenerationReport(cert, "failed", diagnostics=("basis is identically singular",))
    try:
        moved = transport(cert, source)
    except ArithmeticError as exc:
        return DegenerationReport(cert, "failed", diagnostics=(f"transport failed: {exc}",))

    # exceptional values of t: zeros of det and of all denominators (away from the limit point)
    cons = [det.numerator, det.denominator]
    cons += [x.denominator for x in cert.basis.entries if not x.is_polynomial()]
    cons += [v.denominator for _, v in cert.index if not v.is_polynomial()]
    cons += [x.denominator for x in moved.constants().values() if not x.is_polynomial()]
    exc_t = []
    exc_target = []
    for f in merge_constraints(cons):
        if T in f.variables():
            exc_t.append(f)
            g = _content_wrt_t(f)
            if g is not None and not g.is_constant():
                exc_target.extend(merge_constraints([g]))
        else:
            exc_target.append(f)
    # limit denominators at t = 0 may vanish for special target parameters
    for x in moved.constants().values():
        if not x.is_polynomial():
            try:
                d0 = Scalar.from_polys(x.denominator).substitute({T: ZERO})
            except ExceptionalValueError:
                continue
            if d0 and not d0.is_constant():
                exc_target.extend(merge_constraints([d0.numerator]))
    # the index must keep generic t inside the source family's restrictions
    idx = cert.index_dict()
    for r in src_restr:
        v = r.expr.substitute(idx)
        if not v:
            diags.append(f"index violates source restriction {r.text} identically")
        elif not v.is_constant():
            for f in merge_constraints([v.numerator]):
                if T not in f.variables():
                    exc_target.append(f)
                else:
                    g = _content_wrt_t(f)
                    if g is not None and not g.is_constant():
                        exc_target.extend(merge_constraints([g]))
    exc_target = merge_constraints(exc_target)

    problems = _limit_check(moved, target)
    verdict = "failed" if problems or diags else "verified"
    diags.extend(problems)
    checks = []
    if verdict == "verified" and check_exceptional:
        for f in exc_target:
            sols = zero_set_bindings(f)
            if sols is None:
                checks.append(ExceptionalCheck((), "unresolved", f"constraint {f} = 0 not solved"))
                continue
            for sol in sols:
                checks.append(_recheck(cert, source, target, sol))
    return DegenerationReport(cert, verdict, moved, tuple(exc_t), tuple(exc_target), tuple(checks), tuple(diags))


def _recheck(cert, source, target, sol: dict) -> ExceptionalCheck:
    key = tuple(sorted(sol.items()))
    try:
        basis = cert.basis.substitute(sol)
        index = tuple((p, v.substitute(sol)) for p, v in cert.index)
        tgt = target.specialize(sol)
    except ExceptionalValueError as exc:
        return ExceptionalCheck(key, "not_covered", f"certificate undefined there ({exc})")
    sub = DegenerationCertificate(cert.source, cert.target, basis, index, cert.name)
    rep = verify_degeneration(sub, source=source, target=tgt, check_exceptional=False)
    if rep.verified:
        return ExceptionalCheck(key, "verified", "certificate specializes")
    return ExceptionalCheck(key, "not_covered", "; ".join(rep.diagnostics[:2]))


# ---------------------------------------------------------------------------
# closure relation


class BrokenChainError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    evidence: tuple  # certificate names or axiom tags along the chain


class ClosureRelation:
    """Transitive closure of containment edges ``target ⊆ closure(source)``."""

    def __init__(self, edges: Iterable[Edge] = ()):
        self.direct: dict[tuple[str, str], tuple] = {}
        for e in edges:
            self.direct.setdefault((e.source, e.target), e.evidence)
        self.paths: dict[tuple[str, str], tuple] = {}
        self._close()

    def _close(self):
        adj: dict[str, list[str]] = {}
        for (s, t) in sorted(self.direct):
            adj.setdefault(s, []).append(t)
        for s in sorted(adj):
            # breadth-first, so recorded chains are shortest
            seen = {s: ()}
            frontier = [s]
            while frontier:
                nxt = []
                for u in frontier:
                    for v in adj.get(u, []):
                        if v in seen:
                            continue
                        seen[v] = seen[u] + self.direct[(u, v)]
                        nxt.append(v)
                frontier = nxt
            for v, ev in seen.items():
                if v != s:
                    self.paths[(s, v)] = ev

    def contains(self, source: str, target: str) -> bool:
        return source == target or (source, target) in self.paths

    def chain(self, source: str, target: str) -> tuple:
        return self.paths.get((source, target), ())

    def __len__(self):
        return len(self.paths)

    def edges(self) -> list[Edge]:
        return [Edge(s, t, ev) for (s, t), ev in sorted(self.paths.items())]


def closure_chain(assertions: Iterable) -> ClosureRelation:
    """Containment relation generated by verified degenerations (reports, certificates or edges)."""
    edges = []
    for a in assertions:
        if isinstance(a, Edge):
            edges.append(a)
        elif isinstance(a, DegenerationReport):
            if not a.verified:
                raise ValueError(f"certificate {a.certificate} is not verified")
            edges.append(Edge(a.certificate.source, a.certificate.target, (str(a.certificate),)))
        elif isinstance(a, DegenerationCertificate):
            edges.append(Edge(a.source, a.target, (str(a),)))
        else:
            s, t, *rest = a
            edges.append(Edge(s, t, tuple(rest) or (f"{s} -> {t}",)))
    return ClosureRelation(edges)


def compose_chain(certs: Sequence) -> Edge:
    """Compose an explicit chain ``A -> B -> C``; endpoints must match."""
    if not certs:
        raise BrokenChainError("empty chain")
    for a, b in zip(certs, certs[1:]):
        if a.target != b.source:
            raise BrokenChainError(f"chain broken between {a} (target {a.target}) and {b} (source {b.source})")
    return Edge(certs[0].source, certs[-1].target, tuple(str(c) for c in certs))
