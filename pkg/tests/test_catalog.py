import time

import pytest

from conftest import catalog, structure
from leibdegen.algebra import AlgebraStructure, is_leibniz, leibniz_defect
from leibdegen.catalog import CatalogParseError, builtin, normalize_label, parse_algebra, serialize_algebra
from leibdegen.exactmath import S, Scalar

L44_TEXT = """name: L_44
dim: 4
e1 e2 = -e2
e2 e1 = e2
e2 e2 = e3
e3 e1 = 2 e3
e3 e2 = e4
e4 e1 = 3 e4
"""


def test_parse_l44_matches_builtin():
    e = parse_algebra(L44_TEXT)
    assert e.structure == structure("L_44")


def test_empty_products_zero_algebra():
    e = parse_algebra("dim: 4\n")
    assert e.structure == AlgebraStructure.zero(4)


def test_parse_g5_symbolic():
    text = """name: g5
dim: 4
params: a
e1 e2 = e2
e2 e1 = -e2
e1 e3 = a e3
e3 e1 = -a e3
e1 e4 = (a+1) e4
e4 e1 = -(a+1) e4
e2 e3 = e4
e3 e2 = -e4
"""
    A = parse_algebra(text).structure
    assert A.params == ("a",)
    assert A.const(1, 4, 4) == Scalar.var("a") + 1
    assert is_leibniz(A)


def test_builtin_examples():
    R3 = builtin("R_3").structure
    assert R3.const(2, 4, 4) == -1 and R3.const(3, 1, 3) == 1 and R3.const(4, 2, 4) == 1
    assert len(R3.constants()) == 3
    N3 = builtin("N_3^a").structure
    a = Scalar.var("a")
    assert N3.const(1, 1, 4) == 1 and N3.const(1, 2, 4) == a and N3.const(2, 1, 4) == -a
    assert N3.const(2, 2, 4) == 1 and N3.const(3, 3, 4) == 1
    sl2 = builtin("sl_2").structure
    assert sl2.const(2, 3, 1) == 1 and sl2.const(3, 2, 1) == -1


def test_label_lookup():
    assert normalize_label("L_4^a") == normalize_label("L4") == normalize_label("L_{4}")
    assert normalize_label("L_2^n") != normalize_label("L_2")
    assert builtin("L_{21}").label == "L_21^{a,b}"
    with pytest.raises(KeyError):
        builtin("L_99")


def test_inventory():
    cat = catalog()
    assert len(cat.labels("table1")) == 40
    assert sorted(cat.labels("lie")) == ["R_2", "g_4^{a,b}", "g_5^a", "sl_2"]
    assert sorted(cat.labels("nilpotent")) == ["L_11^n", "L_2^n", "L_5^n", "N_3^a"]


def test_identity_suite_timing():
    for e in catalog():
        t0 = time.perf_counter()
        assert leibniz_defect(e.structure) == {}, e.label
        assert time.perf_counter() - t0 < 1.0, e.label


def test_serialize_roundtrip():
    for e in catalog():
        again = parse_algebra(serialize_algebra(e))
        assert again.structure == e.structure
        assert [r.text for r in again.restrictions] == [r.text for r in e.restrictions]


def test_restrictions_parsed():
    e = builtin("L_35^a")
    assert e.restrictions
    assert e.restrictions[0].violated_by({"a": S(-1)})
    assert not e.restrictions[0].violated_by({"a": S(2)})


@pytest.mark.parametrize("text,line,col", [
    ("dim: 4\ne1 e5 = e2\n", 2, 1),
    ("dim: 4\ne1 e2 = e2 +* e3\n", 2, None),
    ("dim: 4\nbogus line\n", 2, 1),
    ("dim: 4\ne1 e2 = e2\ne1 e2 = e3\n", 3, 1),
    ("e1 e2 = e2\n", 1, 1),
    ("dim: 4\nparams: a\ne1 e2 = b e2\n", 3, None),
])
def test_parse_errors(text, line, col):
    with pytest.raises(CatalogParseError) as exc:
        parse_algebra(text, "bad.alg")
    assert exc.value.line == line
    if col is not None:
        assert exc.value.column == col
    assert "bad.alg" in str(exc.value)
