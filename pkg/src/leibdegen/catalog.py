"""Algebra files, the shipped inventory and bundle loading.

Algebra file grammar::

    name: L_4^a
    dim: 4
    params: a
    restrict: a != 0
    tags: table1
    e3 e1 = a e3
    e4 e1 = (1+a) e4

Omitted products are zero.  Coefficients use the Scalar literal grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .algebra import AlgebraStructure, format_vector
from .exactmath import Scalar, ScalarParseError, parse_expression, parse_scalar
from .exactmath.scalar import ZERO

__all__ = [
    "CatalogEntry",
    "CatalogParseError",
    "Catalog",
    "parse_algebra",
    "serialize_algebra",
    "builtin",
    "builtin_catalog",
    "normalize_label",
    "bundle_path",
]


class CatalogParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = ""):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


@dataclass(frozen=True)
class Restriction:
    """Parameter values excluded from a family: ``expr != 0``."""

    expr: Scalar
    text: str

    def violated_by(self, bindings) -> bool:
        v = self.expr.substitute(bindings)
        return v.is_constant() and not v


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    structure: AlgebraStructure
    restrictions: tuple = ()
    tags: tuple = ()
    source: str = ""

    @property
    def params(self) -> tuple:
        return self.structure.params

    @property
    def group(self) -> str:
        for g in ("table1", "lie", "nilpotent"):
            if g in self.tags:
                return g
        return ""


class _Vec:
    """Linear combination of basis vectors, used while parsing right-hand sides."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = tuple(v)

    def __add__(self, other):
        if isinstance(other, _Vec):
            return _Vec(a + b for a, b in zip(self.v, other.v))
        if isinstance(other, Scalar) and not other:
            return self
        raise TypeError("cannot add a scalar to a vector")

    __radd__ = __add__

    def __neg__(self):
        return _Vec(-a for a in self.v)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _Vec):
            raise TypeError("product of two basis vectors on a right-hand side")
        return _Vec(a * other for a in self.v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _Vec):
            raise TypeError("division by a vector")
        return _Vec(a / other for a in self.v)

    def __pow__(self, e):
        raise TypeError("power of a vector")


_PRODUCT = re.compile(r"^\s*e(\d+)\s*(?:\*\s*)?e(\d+)\s*=(.*)$")
_HEADER = re.compile(r"^\s*([A-Za-z_]+)\s*:(.*)$")
_BASIS_NAME = re.compile(r"^e(\d+)$")


def _names(text: str) -> list[str]:
    return [x.strip() for x in text.replace(",", " ").split() if x.strip()]


def parse_algebra(text: str, source: str = "") -> CatalogEntry:
    """Parse an algebra file; errors carry 1-based line and column."""
    label = ""
    dim = None
    params: list[str] = []
    restrict_lines: list[tuple[int, int, str]] = []
    tags: list[str] = []
    products: list[tuple[int, int, int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _PRODUCT.match(line)
        if m:
            products.append((lineno, int(m.group(1)), int(m.group(2)), m.start(3), m.group(3)))
            continue
        h = _HEADER.match(line)
        if not h:
            col = len(line) - len(line.lstrip()) + 1
            raise CatalogParseError("expected 'key: value' header or 'e<i> e<j> = ...' product", lineno, col, source)
        key, value = h.group(1).lower(), h.group(2).strip()
        if key == "name":
            label = value
        elif key == "dim":
            try:
                dim = int(value)
            except ValueError:
                raise CatalogParseError(f"dim must be an integer, got {value!r}", lineno, h.start(2) + 1, source)
            if dim <= 0:
                raise CatalogParseError("dim must be positive", lineno, h.start(2) + 1, source)
        elif key == "params":
            params = _names(value)
            for p in params:
                if p == "i" or p == "t" or _BASIS_NAME.match(p) or not re.match(r"^[A-Za-z_][A-Za-z0-9_']*$", p):
                    raise CatalogParseError(f"invalid parameter name {p!r}", lineno, h.start(2) + 1, source)
        elif key == "restrict":
            restrict_lines.append((lineno, h.start(2), value))
        elif key == "tags":
            tags = _names(value)
        else:
            raise CatalogParseError(f"unknown header {key!r}", lineno, 1, source)
    if dim is None:
        raise CatalogParseError("missing 'dim:' header", 1, 1, source)
    n = dim
    allowed = set(params)

    def atom(name):
        m = _BASIS_NAME.match(name)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= n:
                raise KeyError(name)
            return _Vec(Scalar(1) if j == k - 1 else ZERO for j in range(n))
        if name in allowed:
            return Scalar.var(name)
        raise KeyError(name)

    consts = {}
    for lineno, i, j, col, rhs in products:
        for idx in (i, j):
            if not 1 <= idx <= n:
                raise CatalogParseError(f"basis index e{idx} out of range 1..{n}", lineno, 1, source)
        try:
            val = parse_expression(rhs, atom, lineno)
        except ScalarParseError as exc:
            raise CatalogParseError(str(exc).split(" at ")[0], lineno, col + exc.pos + 1, source) from None
        except TypeError as exc:
            raise CatalogParseError(str(exc), lineno, col + 1, source) from None
        if isinstance(val, Scalar):
            if val:
                raise CatalogParseError("right-hand side is a scalar, not a vector", lineno, col + 1, source)
            val = _Vec((ZERO,) * n)
        if any(consts.get((i - 1, j - 1, k)) is not None for k in range(n)):
            raise CatalogParseError(f"product e{i} e{j} given twice", lineno, 1, source)
        for k, x in enumerate(val.v):
            consts[(i - 1, j - 1, k)] = x
    consts = {key: v for key, v in consts.items() if v}
    restrictions = []
    for lineno, col, value in restrict_lines:
        for part in value.split(";"):
            if not part.strip():
                continue
            if "!=" not in part:
                raise CatalogParseError("restriction must have the form 'lhs != rhs'", lineno, col + 1, source)
            lhs, rhs = part.split("!=", 1)
            try:
                expr = parse_scalar(lhs, allowed, lineno) - parse_scalar(rhs, allowed, lineno)
            except ScalarParseError as exc:
                raise CatalogParseError(str(exc).split(" at ")[0], lineno, col + exc.pos + 1, source) from None
            restrictions.append(Restriction(expr, part.strip()))
    A = AlgebraStructure(n, consts, tuple(params), label)
    return CatalogEntry(label, A, tuple(restrictions), tuple(tags), source)


def serialize_algebra(entry: CatalogEntry | AlgebraStructure) -> str:
    if isinstance(entry, AlgebraStructure):
        entry = CatalogEntry(entry.label, entry)
    A = entry.structure
    lines = []
    if entry.label:
        lines.append(f"name: {entry.label}")
    lines.append(f"dim: {A.dim}")
    if A.params:
        lines.append("params: " + ", ".join(A.params))
    for r in entry.restrictions:
        lines.append(f"restrict: {r.text}")
    if entry.tags:
        lines.append("tags: " + " ".join(entry.tags))
    for i, j, v in A.products():
        lines.append(f"e{i + 1} e{j + 1} = {format_vector(v)}")
    return "\n".join(lines) + "\n"


def normalize_label(label: str) -> str:
    """Lookup key: ``L_4^a``, ``L_4``, ``L4`` and ``L_{4}`` agree; ``^n`` is kept."""
    s = label.strip().replace(" ", "").replace("{", "").replace("}", "")
    s = s.replace("\\mathfrak", "").replace("mathfrak", "")
    nil = False
    m = re.match(r"^(.*?)(\^|\().*$", s)
    if m:
        tail = s[len(m.group(1)):]
        nil = tail.startswith("^n")
        s = m.group(1)
    m = re.match(r"^([A-Za-z]+)_?(\w*)$", s)
    if m:
        s = f"{m.group(1)}_{m.group(2)}" if m.group(2) else m.group(1)
    return s.lower() + ("^n" if nil else "")


def bundle_path() -> Path:
    return Path(str(resources.files("leibdegen") / "bundle"))


class Catalog:
    def __init__(self, entries: Iterable[CatalogEntry] = ()):
        self.entries: dict[str, CatalogEntry] = {}
        self._keys: dict[str, str] = {}
        for e in entries:
            self.add(e)

    def add(self, entry: CatalogEntry):
        key = normalize_label(entry.label)
        if key in self._keys:
            raise ValueError(f"duplicate catalog label {entry.label!r}")
        self.entries[entry.label] = entry
        self._keys[key] = entry.label

    def get(self, label: str) -> CatalogEntry:
        if label in self.entries:
            return self.entries[label]
        key = normalize_label(label)
        if key not in self._keys:
            raise KeyError(f"unknown algebra label {label!r}")
        return self.entries[self._keys[key]]

    def __contains__(self, label: str) -> bool:
        try:
            self.get(label)
            return True
        except KeyError:
            return False

    def __getitem__(self, label: str) -> CatalogEntry:
        return self.get(label)

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def labels(self, group: str | None = None) -> list[str]:
        return [e.label for e in self if group is None or e.group == group]

    @classmethod
    def load(cls, directory: Path | str) -> "Catalog":
        directory = Path(directory)
        entries = []
        for p in sorted(directory.glob("*.alg")):
            entries.append(parse_algebra(p.read_text(), p.name))
        return cls(entries)


@lru_cache(maxsize=None)
def builtin_catalog() -> Catalog:
    return Catalog.load(bundle_path() / "algebras")


def builtin(label: str) -> CatalogEntry:
    return builtin_catalog().get(label)
