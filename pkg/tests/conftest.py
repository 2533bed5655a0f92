import sympy
from hypothesis import strategies as st

from leibdegen.catalog import builtin_catalog, bundle_path
from leibdegen.exactmath import S, Scalar

SYM = {"i": sympy.I, "a": sympy.Symbol("a"), "b": sympy.Symbol("b"), "t": sympy.Symbol("t")}


def to_sympy(x):
    if isinstance(x, Scalar):
        x = str(x)
    return sympy.sympify(str(x).replace("^", "**"), locals=SYM)


def sym_equal(x, y) -> bool:
    return sympy.simplify(to_sympy(x) - to_sympy(y)) == 0


small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def gaussian_consts(draw):
    re = sympy.Rational(draw(small_ints), draw(st.integers(1, 3)))
    im = draw(st.sampled_from([0, 0, 1, -1, sympy.Rational(1, 2)]))
    return S(f"({re.p}/{re.q}) + ({sympy.nsimplify(im)})*i")


@st.composite
def scalars(draw, names=("a", "b"), depth=2):
    """Small rational functions built from constants and parameters."""
    if depth == 0 or draw(st.booleans()):
        if draw(st.booleans()):
            return draw(gaussian_consts())
        return Scalar.var(draw(st.sampled_from(names))) + draw(small_ints)
    x = draw(scalars(names, depth - 1))
    y = draw(scalars(names, depth - 1))
    op = draw(st.sampled_from("+-*/"))
    if op == "/" and not y:
        op = "*"
    return {"+": x + y, "-": x - y, "*": x * y, "/": x / y if op == "/" else x * y}[op]


def catalog():
    return builtin_catalog()


def structure(label):
    return builtin_catalog().get(label).structure


BUNDLE = bundle_path()


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
