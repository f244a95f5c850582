import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import SPECS
from fint.cli import main
from fint.expr import from_json
from fint.scalar import parse_scalar


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_analyze_example_1_1():
    code, text = run("analyze", SPECS / "ex1_1.json")
    assert code == 0
    assert "eigenvalues: 0, 1 (×2), 2; divisors: λ, λ−1, λ−1, λ−2" in text
    assert text.startswith("class: constant")


def test_analyze_zero_matrix(tmp_path):
    p = write(tmp_path, {"n": 3, "terms": [{"A": [[0, 0, 0]] * 3}]})
    code, text = run("analyze", p)
    assert code == 0 and "λ=0 ×3, 3 simple divisors" in text


def test_analyze_example_2_17_divisor():
    code, text = run("analyze", SPECS / "ex2_17.json")
    assert code == 0
    assert "λ¹=1 ×4, divisors (λ¹−1)⁴" in text


def test_basis_example_1_1():
    code, text = run("basis", SPECS / "ex1_1.json", "--mode", "autonomous")
    assert code == 0
    lines = [s for s in text.splitlines() if s.startswith("F")]
    assert len(lines) == 3
    assert lines[0] == "F1 [kernel-form] = x1-x2+x3-x4"


def test_basis_one_dimensional_note(tmp_path):
    p = write(tmp_path, {"n": 1, "terms": [{"A": [[2]]}]})
    code, text = run("basis", p)
    assert code == 0
    assert "integrals: 0" in text and "note: n = 1" in text
    code, text = run("basis", p, "--mode", "full")
    assert code == 0 and "F1 [eigen-time] = x1*exp(-2*t)" in text


def test_basis_example_3_1_tags():
    code, text = run("basis", SPECS / "ex3_1.json")
    assert code == 0
    assert text.count("[reduced-eigen-time]") == 2


def test_verify_passes_and_inject_fails():
    code, text = run("verify", SPECS / "ex1_1.json", "--trajectories", 20)
    assert code == 0 and text.startswith("PASS") and "rank: 3 (expected 3)" in text
    code, text = run("verify", SPECS / "ex1_1.json", "--inject-test")
    assert code == 5 and text.startswith("FAIL")
    assert "offenders: F1" in text


def test_verify_example_2_6():
    code, text = run("verify", SPECS / "ex2_6.json", "--json")
    assert code == 0
    doc = json.loads(text)
    assert doc["passed"] and max(c["rel_drift"] for c in doc["integrals"]) < 1e-7


@pytest.mark.parametrize("doc,code", [
    ("{not json", 2),
    ({"n": 2}, 2),
    ({"n": 2, "terms": [{"A": [[1, 2, 3]]}]}, 2),
    ({"n": 1, "terms": [{"alpha": "sin(", "A": [[1]]}]}, 2),
    ({"n": 2, "terms": [{"A": [[1, 0], [0, 1]]}], "extra": 1}, 2),
    ({"n": 2, "terms": [{"alpha": "1", "A": [[0, 1], [0, 0]]},
                        {"alpha": "t", "A": [[0, 0], [1, 0]]}]}, 3),
])
def test_exit_codes_for_bad_input(tmp_path, doc, code):
    p = write(tmp_path, doc)
    assert run("basis", p)[0] == code


def test_missing_file_and_bad_flags(tmp_path):
    assert run("analyze", tmp_path / "nope.json")[0] == 2
    assert run("basis", SPECS / "ex1_1.json", "--mode", "sideways")[0] == 2
    assert run()[0] == 2


def test_construction_failure_exit_code():
    code, _ = run("basis", SPECS / "ex2_6.json", "--mode", "autonomous")
    assert code == 4
    code, _ = run("basis", SPECS / "ex1_14.json", "--mode", "autonomous")
    assert code == 4


def test_json_is_stable_and_round_trips():
    _, a = run("basis", SPECS / "ex1_14.json", "--json")
    _, b = run("basis", SPECS / "ex1_14.json", "--json")
    assert a == b
    doc = json.loads(a)
    assert list(doc) == ["mode", "class", "integrals", "notes"]
    x = np.array([0.3, -0.2, 0.5])
    for item in doc["integrals"]:
        assert list(item) == ["index", "tag", "formula", "singular_set", "tree"]
        F = from_json(item["tree"])
        assert F.format() == item["formula"]
        assert np.isfinite(F.evaluate(0.4, x))


@pytest.mark.parametrize("name", ["ex3_1", "ex3_5", "ex1_14", "ex2_23"])
def test_json_scalar_fields_parse(name):
    _, text = run("basis", SPECS / f"{name}.json", "--json")
    seen = []

    def walk(node, key=None):
        if isinstance(node, dict):
            for k, v in node.items():
                walk(v, k)
        elif isinstance(node, list):
            for v in node:
                walk(v, key)
        elif isinstance(node, str) and key not in ("node", "part", "op"):
            seen.append(parse_scalar(node))

    for item in json.loads(text)["integrals"]:
        walk(item["tree"])
    assert seen


def test_analyze_json():
    code, text = run("analyze", SPECS / "ex2_6.json", "--json")
    assert code == 0
    doc = json.loads(text)
    assert doc["class"] == "lappo_danilevskii"


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "fint.cli", "analyze", str(SPECS / "ex1_5.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "(λ−2)³" in out.stdout
