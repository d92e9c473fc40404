from __future__ import annotations

import json

import pytest

from heintze.cli import main

SPEC = {"blocks": [{"alpha": 1.0, "sizes": [1]}, {"alpha": 2.0, "sizes": [1]}]}
JSPEC = {"blocks": [{"alpha": 1.0, "sizes": [2]}, {"alpha": 2.0, "sizes": [1]}]}


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def run(capsysbinary, argv):
    code = main(argv)
    out = capsysbinary.readouterr().out
    return code, out


def test_dm_eval(files, capsysbinary):
    code, out = run(capsysbinary, ["dm", "eval", "--spec", files("s.json", SPEC), "--p", "1,9", "--q", "0,0"])
    doc = json.loads(out)
    assert code == 0 and doc["checks"][0]["value"] == pytest.approx(3.0)
    code, out = run(capsysbinary, ["dm", "eval", "--spec", files("s.json", SPEC), "--p", "1,9",
                                   "--q", "0,0", "--method", "coordinate", "--format", "csv"])
    assert code == 0 and out.startswith(b"check,status")


def test_dm_table_and_audit(files, capsysbinary):
    s = files("s.json", SPEC)
    code, out = run(capsysbinary, ["dm", "table", "--spec", s, "--count", "3", "--format", "csv"])
    assert code == 0 and len(out.splitlines()) == 4
    code, out = run(capsysbinary, ["dm", "audit-triangle", "--spec", s, "--trials", "500", "--bound", "1.000000001"])
    assert code == 0
    half = files("h.json", {"blocks": [{"alpha": 0.5, "sizes": [1]}]})
    code, out = run(capsysbinary, ["dm", "audit-triangle", "--spec", half, "--trials", "500", "--bound", "1.5"])
    assert code == 1


def test_triangle_classify(files, capsysbinary):
    s = files("s.json", JSPEC)
    code, out = run(capsysbinary, ["triangle", "classify", "--spec", s, "--p", "0,3,0", "--q", "0,0,0",
                                   "--level", "1,2"])
    doc = json.loads(out)["checks"][0]
    assert code == 0 and doc["witness"]["kind"] == "finite" and len(doc["witness"]["evidence"]) == 4
    code, _ = run(capsysbinary, ["triangle", "classify", "--spec", s, "--p", "0,3,0", "--q", "0,0,0",
                                 "--level", "3,1"])
    assert code == 2


def test_map_commands(files, capsysbinary):
    s = files("s.json", SPEC)
    swap = files("m.json", {"kind": "linear", "matrix": [[0, 1], [1, 0]]})
    dil = files("d.json", {"kind": "dilation", "t": 2.0})
    code, out = run(capsysbinary, ["map", "check-foliation", "--spec", s, "--map", swap, "--triangle"])
    assert code == 1
    code, out = run(capsysbinary, ["map", "check-foliation", "--spec", s, "--map", dil, "--triangle"])
    assert code == 0
    code, out = run(capsysbinary, ["map", "check-bilip", "--spec", s, "--map", dil, "--trials", "50"])
    assert code == 0 and json.loads(out)["checks"][0]["witness"]["kind"] == "sim"
    j = files("j.json", JSPEC)
    q = files("q.json", {"kind": "affine_qsim", "s": 1.0, "rotation": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                         "translation": [0, 0, 0]})
    code, out = run(capsysbinary, ["map", "xi-curve", "--spec", j, "--map", q, "--source", "1,2",
                                   "--target", "1,1", "--trials", "3"])
    assert code == 0 and len(json.loads(out)["checks"]) == 4
    sh = files("sh.json", {"kind": "unipotent_shear",
                           "B": [{"i": 1, "expr": "poly", "coeffs": [[1.0, [2, 1]]]}]})
    code, out = run(capsysbinary, ["map", "cocycle", "--spec", j, "--map", sh, "--y", "0.1,0.2,0.3", "--n", "7"])
    assert code == 0
    code, _ = run(capsysbinary, ["map", "cocycle", "--spec", j, "--map", q, "--y", "0.1,0.2,0.3"])
    assert code == 2


def test_rotation_blowup(files, capsysbinary):
    s = files("s.json", {"blocks": [{"alpha": 1.0, "sizes": [1, 1]}, {"alpha": 2.0, "sizes": [1]}]})
    rot = files("r.json", {"x_levels": [[1, 1]], "y": [1.0], "y_prime": [-1.0],
                           "R_y": [[1, 0], [0, 1]], "R_y_prime": [[-1, 0], [0, -1]],
                           "B_y": [0.5, 0], "B_y_prime": [-0.5, 0]})
    code, out = run(capsysbinary, ["map", "rotation-blowup", "--spec", s, "--map", rot])
    doc = json.loads(out)["checks"][0]
    assert code == 1 and doc["witness"]["status"] == "violation"


def test_action_constants(files, capsysbinary):
    s = files("s.json", SPEC)
    dil = files("d.json", {"kind": "dilation", "t": 2.718281828459045})
    code, out = run(capsysbinary, ["action", "constants", "--spec", s, "--map", dil, "--shift", "1",
                                   "--trials", "100"])
    assert code == 0
    assert json.loads(out)["checks"][0]["value"] == pytest.approx(2.718281828459045, rel=1e-9)
    code, out = run(capsysbinary, ["action", "constants", "--spec", s, "--map", dil, "--shift", "0.5",
                                   "--trials", "100"])
    assert code == 1


def test_invalid_inputs(files, capsysbinary, tmp_path):
    assert main(["dm", "eval", "--spec", str(tmp_path / "missing.json"), "--p", "1", "--q", "0"]) == 2
    bad = files("b.json", {"blocks": [{"alpha": -1, "sizes": [1]}]})
    assert main(["dm", "eval", "--spec", bad, "--p", "1", "--q", "0"]) == 2
    s = files("s.json", SPEC)
    assert main(["dm", "eval", "--spec", s, "--p", "1", "--q", "0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["dm", "nope"])
    assert exc.value.code == 2


def test_out_file(files, tmp_path):
    out = tmp_path / "o.csv"
    assert main(["dm", "eval", "--spec", files("s.json", SPEC), "--p", "1,9", "--q", "0,0",
                 "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("check,status,value,witness,seconds\n")
