import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).resolve().parents[1] / "data"


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "nordenkit", *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_validate_shipped_example():
    code, out, _ = run("validate", "--input", str(DATA / "paper_g.json"))
    assert code == 0 and "overall: PASS" in out


def test_classify_flat_kaehler():
    code, out, _ = run("classify", "--input", str(DATA / "flat_kahler.json"))
    assert code == 0
    assert "W0: PASS" in out


def test_canonical_and_prime_embedding_give_same_curvature():
    _, a, _ = run("curvature", "--input", str(DATA / "paper_g.json"), "--family", "natural",
                  "--params", "0.25", "0", "--format", "json", "--full")
    _, b, _ = run("curvature", "--input", str(DATA / "paper_g.json"), "--family", "prime",
                  "--params", "0", "0", "0", "0", "0", "-0.25", "0", "0.25", "--format", "json", "--full")
    ra = np.array([row[-1] for row in json.loads(a)["R[x,y,z,u]"]])
    rb = np.array([row[-1] for row in json.loads(b)["R[x,y,z,u]"]])
    np.testing.assert_allclose(ra, rb, atol=1e-12)


def test_connection_reasserts_property():
    code, out, _ = run("connection", "--family", "symmetric", "--params", "0.1", "0.2", "0.3", "0.4")
    assert code == 0
    assert "symmetric connection is complex: PASS" in out
    assert "symmetric connection is symmetric: PASS" in out


def test_wrong_arity_is_usage_error():
    code, _, err = run("connection", "--family", "natural", "--params", "0.25")
    assert code == 2 and "--params" in err


def test_unknown_flag_is_usage_error():
    code, _, _ = run("validate", "--bogus")
    assert code == 2


@pytest.mark.parametrize(
    "doc,field",
    [
        ({"n": 2, "g": [[1, 0], [0, 1]], "J": [], "C": []}, "g"),
        ({"n": 2, "g": np.diag([1, 1, -1, -1]).tolist(),
          "J": [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
          "C": [{"i": 3, "j": 2, "k": 1, "value": 1}]}, "C[0].i"),
        ({"n": 2, "J": [], "C": []}, "g"),
    ],
)
def test_corrupted_spec_exit_2_names_field(tmp_path, doc, field):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run("validate", "--input", str(path))
    assert code == 2
    assert field in err


def test_non_symmetric_metric_exit_1(tmp_path):
    doc = json.loads((DATA / "paper_g.json").read_text())
    doc["g"][0][1] = 0.5
    path = tmp_path / "ns.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run("validate", "--input", str(path))
    assert code == 1 and "g symmetry: FAIL" in out


def test_verify_paper_json_is_byte_identical():
    args = ("verify-paper", "--lambda", "1", "--mu", "2", "--trials", "5", "--seed", "7", "--format", "json")
    a, b = run(*args), run(*args)
    assert a[1] == b[1]
    doc = json.loads(a[1])
    assert doc["seed"] == 7
    names = [r["name"] for r in doc["records"]]
    assert "R-prime flat (lambda_7 = -lambda_5, lambda_8 = -lambda_6)" in names


def test_text_and_json_carry_same_records():
    args = ("verify-paper", "--lambda", "3", "--mu", "-1", "--trials", "3")
    _, text, _ = run(*args)
    _, js, _ = run(*args, "--format", "json")
    recs = json.loads(js)["records"]
    for r in recs:
        assert f"{r['name']}: {r['verdict']}" in text
    assert f"({len(recs)} records)" in text


def test_conformal_from_spec_block(tmp_path):
    doc = json.loads((DATA / "paper_g.json").read_text())
    doc["conformal"] = {"sigma": [1.0, 0.0, 0.0, 0.5], "factor": 2.0}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run("conformal", "--input", str(path))
    assert code == 0
    assert "R0-bar = c R0: EXPECTED-FAILURE" in out
    assert "curvature defect = d sigma (x) id: PASS" in out


def test_properties_command():
    code, out, _ = run("properties", "--trials", "5", "--seed", "3")
    assert code == 0 and "B({psi1 - psi2}(S_h)) = 0: PASS" in out


def test_env_tolerance_override():
    import os

    env = dict(os.environ, NORDEN_TOL_ABS="1e-3")
    proc = subprocess.run([sys.executable, "-m", "nordenkit", "validate", "--format", "json"],
                          capture_output=True, text=True, env=env)
    doc = json.loads(proc.stdout)
    assert doc["records"][0]["tolerance"] >= 1e-3
