import json
import subprocess
import sys

from conftest import BUNDLE
from leibdegen.cli import main

DEG = BUNDLE / "certificates" / "degenerations"
SEP = BUNDLE / "certificates" / "separations"


def run(*args):
    return subprocess.run([sys.executable, "-m", "leibdegen.cli", *args], capture_output=True, text=True)


def test_check_ok(capsys):
    assert main(["check", str(BUNDLE / "algebras" / "L_44.alg")]) == 0
    out = capsys.readouterr().out
    assert "Leibniz identity holds" in out and "dim Der" in out


def test_check_fails_on_non_leibniz(tmp_path, capsys):
    p = tmp_path / "bad.alg"
    p.write_text("dim: 1\ne1 e1 = e1\n")
    assert main(["check", str(p)]) == 1
    assert "FAILS" in capsys.readouterr().out


def test_check_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.alg"
    p.write_text("dim: 4\ne1 e9 = e1\n")
    assert main(["check", str(p)]) == 1
    assert "bad.alg:2:" in capsys.readouterr().out


def test_invariants(capsys):
    assert main(["invariants", "L_4^a"]) == 0
    out = capsys.readouterr().out
    assert "dim Der: 3" in out


def test_degenerate(capsys):
    assert main(["degenerate", str(DEG / "R_1-L_7.deg")]) == 0
    assert "verified" in capsys.readouterr().out


def test_degenerate_json(capsys):
    assert main(["degenerate", str(DEG / "L_9-N_3.deg"), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "verified"


def test_separate(capsys):
    assert main(["separate", str(SEP / "L_44-L_5n.sep")]) == 0
    assert main(["separate", str(SEP / "L_8-L_2.sep")]) == 1


def test_six_tuple(capsys):
    assert main(["six-tuple", "L_44"]) == 0
    assert "(1, 2, 3, -1, 0, 0)" in capsys.readouterr().out
    assert main(["six-tuple", "L_15^a"]) == 1


def test_verify_theorem_report_is_byte_stable(tmp_path):
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    p1 = run("verify-theorem", "--report", str(r1))
    p2 = run("verify-theorem", "--report", str(r2))
    # the shipped claim is contradicted (L_8^a -> L_2), so this is a verification failure
    assert p1.returncode == p2.returncode == 1
    assert r1.read_bytes() == r2.read_bytes()
    doc = json.loads(r1.read_text())
    assert doc["success"] is False
    assert doc["unresolved_pairs"] == []
    assert "theorem NOT verified" in p1.stdout


def test_conjectures_cli():
    p = run("conjectures")
    assert p.returncode == 0
    assert "Grunewald-O'Halloran: invalid (witness L_5^n)" in p.stdout
    assert "Vergne: valid" in p.stdout
