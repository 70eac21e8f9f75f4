import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from crossover_uo.catalog import FIXTURE_TEXT, williams
from crossover_uo.cli import main
from crossover_uo.design import format_design, parse_design
from crossover_uo.ratmat import RationalMatrix


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text), text


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, text):
        path = tmp_path / name
        path.write_text(text)
        paths[name] = str(path)

    put("fixture.txt", FIXTURE_TEXT)
    put("selfsucc.txt", "1 2 3\n1 3 2\n2 1 3\n")
    put("nonbinary.txt", "1 2 3\n2 3 1\n1 2 3\n")
    put("big_v8.txt", format_design(williams(8)))
    paths["missing.txt"] = str(tmp_path / "missing.txt")
    return paths


def test_verify(files):
    code, rep, _ = run_json("verify", files["fixture.txt"])
    assert code == 0
    assert rep["schema_version"] == 1
    assert rep["class_D"] and rep["class_B"] and rep["connected"]
    assert rep["patterson"]["passed"]
    assert rep["patterson"]["params"]["lambda"] == 2


def test_verify_self_succession(files):
    code, rep, _ = run_json("verify", files["selfsucc.txt"])
    assert code == 1
    assert rep["no_self_succession"] is False


def test_verify_missing_file(files):
    code, _ = run("verify", files["missing.txt"])
    assert code == 2


def test_verify_class_only(files):
    code, rep, _ = run_json("verify", files["nonbinary.txt"], "--class-only")
    assert rep["class_B"] is False
    assert code == (0 if rep["class_D"] else 1)


def test_info_direct_schur(files):
    code, rep, _ = run_json("info", files["fixture.txt"], "--matrix", "C11.22", "--periods", "adjusted")
    assert code == 0
    M = RationalMatrix.from_json(json.dumps(rep["matrix"]))
    assert M == Fraction(136, 21) * RationalMatrix.centering(4)


@pytest.mark.parametrize("name, diag, off", [("S", 0, 2), ("Theta", 3, 2)])
def test_info_counts(files, name, diag, off):
    code, rep, _ = run_json("info", files["fixture.txt"], "--matrix", name)
    assert code == 0
    m = rep["matrix"]
    assert {m[i][i] for i in range(4)} == {str(diag)}
    assert {m[i][j] for i in range(4) for j in range(4) if i != j} == {str(off)}


def test_info_csv_and_layout(files):
    code, text = run("info", files["fixture.txt"], "--matrix", "M", "--format", "csv")
    assert code == 0
    assert RationalMatrix.from_csv(text).shape == (11, 11)
    code, rep, _ = run_json("info", files["fixture.txt"], "--matrix", "M")
    assert [b["block"] for b in rep["layout"]] == ["tau", "delta", "alpha"]


def test_json_round_trip(files):
    for argv in (("verify", files["fixture.txt"]), ("info", files["fixture.txt"], "--matrix", "C")):
        _, rep, text = run_json(*argv)
        assert json.dumps(rep, indent=2) + "\n" == text


def test_efficiency_table1():
    code, text = run("efficiency", "--pairs", "table1")
    lines = text.strip().splitlines()
    assert code == 0
    assert lines[0] == "p,v,e_star"
    assert len(lines) == 19
    assert lines[1] == "3,3,0.993103"


def test_efficiency_single():
    code, text = run("efficiency", "--p", "6", "--v", "11")
    assert code == 0
    assert text.strip().splitlines()[1] == "6,11,0.999988"
    code, rep, _ = run_json("efficiency", "--p", "3", "--v", "3", "--format", "json")
    assert rep["rows"][0]["e_star"] == "144/145"


@pytest.mark.parametrize("argv", [
    ("efficiency", "--p", "2", "--v", "2"),
    ("efficiency",),
    ("efficiency", "--p", "3"),
    ("construct", "williams", "--v", "2"),
    ("construct", "williams"),
    ("certify", "--p", "3", "--v", "4"),
    ("certify", "--p", "3", "--v", "4", "--t", "1"),
    ("certify", "--p", "3", "--v", "4", "--t", "3", "--competitors", "exhaustive"),
    ("certify", "--p", "3", "--v", "3", "--t", "2", "--competitors", "sample", "x"),
    ("nonsense",),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_certify_exhaustive_direct():
    code, rep, _ = run_json("certify", "--p", "3", "--v", "3", "--t", "2", "--mode", "direct",
                            "--competitors", "exhaustive")
    assert code == 0
    assert rep["failures"] == [] and rep["chain_failures"] == []
    assert rep["competitors_tested"] > 10000


def test_certify_joint_binary_sample():
    code, rep, _ = run_json("certify", "--p", "3", "--v", "4", "--t", "3", "--mode", "joint-binary",
                            "--competitors", "sample", "200", "--seed", "1")
    assert code == 0
    assert rep["competitors_tested"] == 200 and rep["failures"] == []
    assert rep["seed"] == 1


def test_certify_functional_sample():
    code, rep, _ = run_json("certify", "--p", "3", "--v", "4", "--t", "3", "--mode", "functional",
                            "--competitors", "sample", "200", "--seed", "1")
    assert code == 0
    assert rep["A_star"] == "981/17"
    assert rep["failures"] == [] and rep["equality_off_origin"] == []


def test_certify_sample_is_deterministic():
    a = run("certify", "--p", "3", "--v", "3", "--t", "2", "--mode", "residual",
            "--competitors", "sample", "20", "--seed", "5")
    b = run("certify", "--p", "3", "--v", "3", "--t", "2", "--mode", "residual",
            "--competitors", "sample", "20", "--seed", "5")
    assert a == b and a[0] == 0


def test_certify_from_design_file(files):
    code, rep, _ = run_json("certify", "--design", files["fixture.txt"], "--mode", "residual",
                            "--competitors", "sample", "10")
    assert code == 0
    assert rep["params"]["t"] == 3
    assert run("certify", "--design", files["selfsucc.txt"])[0] == 2


def test_construct_fixture():
    code, text = run("construct", "fixture")
    assert code == 0
    assert parse_design(text) == parse_design(FIXTURE_TEXT)


def test_construct_williams(tmp_path):
    code, text = run("construct", "williams", "--v", "4")
    assert code == 0
    d = parse_design(text)
    assert (d.p, d.n) == (4, 4)
    path = tmp_path / "w4.txt"
    path.write_text(text)
    assert run("verify", str(path))[0] == 0
    code, text = run("construct", "williams", "--v", "5", "--letters")
    assert parse_design(text).v == 5


def test_average_fixture(files):
    code, rep, _ = run_json("average", files["fixture.txt"])
    assert code == 0
    assert rep["match"] is True and rep["eq32"] is True


def test_average_nonbinary(files):
    code, rep, _ = run_json("average", files["nonbinary.txt"])
    assert code == 0
    assert rep["match"] is True and rep["eq32"] == "not-applicable"


def test_average_big_v(files):
    code, rep, _ = run_json("average", files["big_v8.txt"])
    assert code == 2
    assert "matrix" in rep["closed_form"]
    assert "error" in rep["brute_force"]


def test_module_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "crossover_uo", "verify", files["fixture.txt"]],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["patterson"]["passed"]


def test_version():
    assert run("--version")[0] == 0
