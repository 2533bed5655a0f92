import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import scalars, sym_equal, to_sympy
from leibdegen.exactmath import (
    I,
    ExceptionalValueError,
    GaussianRational,
    MultiPoly,
    PolyIdeal,
    S,
    Scalar,
    ScalarMatrix,
    ScalarParseError,
    eliminate,
    find_point,
    groebner,
    ideal_query,
    mat_solve,
    parse_scalar,
)

a, t = Scalar.var("a"), Scalar.var("t")


def P(text, gens=None):
    p = parse_scalar(text).numerator
    return p.with_gens(gens) if gens else p


# scalar arithmetic -----------------------------------------------------------

def test_add_halves():
    assert S("1/2") + S("1/2") == S(1)


def test_i_squared():
    assert S("i") * S("i") == S(-1)


def test_division_cancels():
    assert (a**2 - 1) / (a - 1) == a + 1


def test_gaussian_inverse():
    z = GaussianRational(1, 2)
    assert z * z.inverse() == 1
    assert GaussianRational(3, 0) == 3


def test_substitute_linear():
    assert (a + 1).substitute({"a": t - 1}) == t


def test_substitute_index():
    assert parse_scalar("-a/(1-a)^2").substitute({"a": S(2)}) == S(-2)


def test_substitute_pole():
    with pytest.raises(ExceptionalValueError):
        (1 / (a - 1)).substitute({"a": S(1)})


def test_parse_grammar():
    assert parse_scalar("1/2*i") == S("i") / 2
    assert parse_scalar("-(a)/( (1-a)^2 )") == -a / (1 - a) ** 2
    with pytest.raises(ScalarParseError):
        parse_scalar("a +* 2")
    with pytest.raises(ScalarParseError):
        parse_scalar("a^(1/2)")


def test_canonical_denominator():
    x = S(1) / (2 * a - 2)
    assert x.denominator.terms[0][1] == 1


@settings(max_examples=250, deadline=None)
@given(scalars(), scalars())
def test_arith_matches_sympy(x, y):
    assert sym_equal(x + y, to_sympy(x) + to_sympy(y))
    assert sym_equal(x * y, to_sympy(x) * to_sympy(y))
    if y:
        assert sym_equal(x / y, to_sympy(x) / to_sympy(y))


@settings(max_examples=250, deadline=None)
@given(scalars())
def test_parse_str_roundtrip(x):
    assert parse_scalar(str(x)) == x
    assert Scalar(x) == x
    assert hash(parse_scalar(str(x))) == hash(x)


@settings(max_examples=200, deadline=None)
@given(scalars(), st.integers(-5, 5))
def test_substitute_matches_sympy(x, v):
    try:
        got = x.substitute({"a": S(v)})
    except ExceptionalValueError:
        assert sympy.simplify(to_sympy(x).as_numer_denom()[1].subs("a", v)) == 0
        return
    assert sym_equal(got, to_sympy(x).subs(sympy.Symbol("a"), v))


# linear algebra --------------------------------------------------------------

def test_rank_identity():
    assert mat_solve(ScalarMatrix.identity(2), "rank").rank == 2


def test_kernel_parametric():
    M = ScalarMatrix.from_rows([[1, a], [0, 0]])
    res = mat_solve(M, "kernel_basis")
    assert len(res.kernel) == 1
    v = res.kernel[0]
    assert v[1] * (-a) == v[0]
    assert res.exceptional == ()


def test_inverse_adjugate():
    M = ScalarMatrix.from_rows([[t, 0], [1, t]])
    inv = mat_solve(M, "inverse").inverse
    assert inv.to_rows() == [[1 / t, S(0)], [-1 / t**2, 1 / t]]


def test_rank_exceptional_locus():
    M = ScalarMatrix.from_rows([[1, 1], [1, a]])
    res = mat_solve(M, "rank")
    assert res.rank == 2
    assert [str(p) for p in res.exceptional] == ["a-1"]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_rank_matches_sympy(rows):
    M = ScalarMatrix.from_rows([[S(x) for x in r] for r in rows])
    assert mat_solve(M, "rank").rank == sympy.Matrix(rows).rank()


# groebner --------------------------------------------------------------------

def test_groebner_inconsistent():
    gb = groebner(PolyIdeal([P("x"), P("x-1")]))
    assert gb.complete and gb.basis.is_unit()


def test_groebner_xy():
    gb = groebner(PolyIdeal([P("x*y-1"), P("x^2", ("x", "y"))]))
    assert gb.basis.is_unit()


def test_groebner_principal():
    gb = groebner(PolyIdeal([P("x^2+1")]))
    assert [str(g) for g in gb.basis.generators] == ["x^2+1"]


def test_ideal_queries():
    assert ideal_query(PolyIdeal([MultiPoly.constant(1, ("x",))]), "is_unit").answer is True
    gb = groebner(PolyIdeal([P("x")]))
    assert ideal_query(gb, "contains", P("x^2+x")).answer is True
    assert ideal_query(groebner(PolyIdeal([P("x^2+1")])), "is_unit").answer is False


def test_budget_exceeded_is_inconclusive():
    from leibdegen.exactmath import Budget

    gens = ("x", "y", "z")
    I_ = PolyIdeal([P("x^2*y-z+1", gens), P("y^2*z-x-1", gens), P("z^2*x-y+2", gens)])
    gb = groebner(I_, Budget(max_reductions=3))
    assert gb.status == "budget_exceeded"
    assert ideal_query(gb, "is_unit").answer is None


def test_eliminate_and_point():
    gens = ("x", "y")
    I_ = PolyIdeal([P("x-y^2", gens), P("y-2", gens)])
    el = eliminate(I_, ["y"])
    assert [str(g) for g in el.basis.generators] == ["x-4"]
    pt = find_point(I_)
    assert pt == {"x": 4, "y": 2}


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3),
       st.integers(-3, 3), st.integers(-3, 3))
def test_groebner_membership_sound(coeffs, m1, m2):
    # random combinations of the generators lie in the ideal; sympy agrees on the basis
    gens = ("x", "y")
    g1 = P(f"x^2-({m1})*y", gens)
    g2 = P(f"x*y-({m2})", gens)
    gb = groebner(PolyIdeal([g1, g2]))
    assert gb.complete
    f = MultiPoly.constant(0, gens)
    for c1, c2, c3 in coeffs:
        f = f + g1 * P(f"{c1}*x+{c2}", gens) + g2 * P(f"{c3}*y", gens)
    assert ideal_query(gb, "contains", f).answer is True
    x, y = sympy.symbols("x y")
    ref = sympy.groebner([x**2 - m1 * y, x * y - m2], x, y, order="grevlex")
    assert gb.basis.is_unit() == (list(ref.exprs) == [1])
    probe = P("x+y+1", gens)
    assert ideal_query(gb, "contains", probe).answer == ref.contains(x + y + 1)


def test_complex_coefficients():
    z = S("1+i") * S("1-i")
    assert z == S(2)
    assert I * I == -1
