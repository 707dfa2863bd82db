import json
from fractions import Fraction

import jsonschema
import pytest

from padiclab.cli import main, schema_for


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    doc = json.loads(out)
    if doc.get("status") != "error":
        jsonschema.validate(doc, schema_for(doc["command"]))
    assert doc["schema"] == f"padiclab/{doc['command']}/v1"
    return code, doc, err


def test_integrate_example(capsys):
    code, doc, err = run_json(capsys, "integrate", "--p", "3", "--r", "1", "--poly", "x0", "--depth", "8")
    assert code == 0
    lo = Fraction(doc["result"]["lower"]["exact"])
    hi = Fraction(doc["result"]["upper"]["exact"])
    assert lo <= Fraction(3, 4) <= hi
    assert "elapsed" in err and "elapsed" not in json.dumps(doc)


def test_pseudonorm(capsys):
    code, doc, _ = run_json(capsys, "pseudonorm", "--p", "7", "--h=-1,0,0,0,0,1", "--depth", "3")
    assert code == 0
    assert doc["parameters"]["depth"] == 3


def test_equimeasure_self(capsys):
    forms = "1;0,1"
    code, doc, _ = run_json(
        capsys, "equimeasure", "--p", "7", "--h1=-1,0,0,0,0,1", "--h2=-1,0,0,0,0,1",
        "--forms1", forms, "--forms2", forms, "--depth", "1",
    )
    assert code == 0 and doc["result"]["verdict"] == "EQUAL"


def test_witness_example(capsys):
    code, doc, _ = run_json(capsys, "witness", "--p", "3", "--r", "1")
    assert code == 0
    fn = doc["result"]["function"]
    assert fn["support_radius"] == "3"
    assert [(t["a"]["exact"], t["c"]) for t in fn["terms"]] == [("1", "1"), ("-3", "3")]


def test_fourier_indicator(capsys):
    code, doc, _ = run_json(capsys, "fourier", "--p", "3", "--coset", "0:1:1", "--tau", "1/3")
    assert code == 0
    assert doc["result"]["transform"]["phases"] == [{"phase": "0", "coefficient": "1/3"}]


def test_count_points(capsys):
    code, doc, _ = run_json(capsys, "count-points", "--field", "5", "--poly", "y^2*z - x^3 - x*z^2")
    assert code == 0 and doc["result"] == {"count": 4, "candidates": 31}


def test_count_points_from_file(tmp_path, capsys):
    path = tmp_path / "line.txt"
    path.write_text("x + y + z\n")
    code, doc, _ = run_json(capsys, "count-points", "--field", "3^2", "--poly", str(path))
    assert doc["result"]["count"] == 10


def test_bounds_example(capsys):
    code, doc, _ = run_json(capsys, "bounds", "--profile", "2,4,0", "--ksq", "1", "--genus", "2", "--ci", "3")
    assert code == 0
    res = doc["result"]
    assert res["profile"]["threshold"] == 36
    assert res["ksq"]["threshold"] == 14400
    assert res["genus"]["threshold"] == 16
    assert res["ci"]["threshold"] == 288


def test_verify_nontrivial_writes_certificate(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code, doc, _ = run_json(capsys, "verify-nontrivial", "--field", "13", "--poly", "x^3+y^3+z^3+w^3", "--certificate", str(out))
    assert code == 0 and doc["result"]["ok"]
    assert json.loads(out.read_text()) == doc


def test_property_failure_exit_code(capsys):
    code, doc, _ = run_json(capsys, "verify-nontrivial", "--field", "7", "--poly", "x^2*y + z^3 + w^3")
    assert code == 3
    assert doc["status"] == "property-failure"
    assert doc["result"]["failed_stage"] == "smoothness"


def test_computation_error_exit_code(capsys):
    # x^2 + x^5 has a double root at 0
    code, doc, err = run_json(capsys, "pseudonorm", "--p", "7", "--h", "0,0,1,0,0,1")
    assert code == 2 and doc["status"] == "error"
    assert "computation error" in err


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["integrate", "--p", "3", "--r", "x", "--poly", "x0"], "--r"),
        (["integrate", "--p", "3", "--poly", "x^"], "--poly"),
        (["bounds", "--profile", "2,4"], "--profile"),
        (["bounds", "--ci", "a,b"], "--ci"),
        (["fourier", "--p", "3", "--coset", "0:1", "--tau", "1"], "--coset"),
        (["corpus", "--criteria", "11"], "--criteria"),
    ],
)
def test_usage_errors_name_the_flag(capsys, argv, flag):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert flag in err


def test_argparse_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["integrate", "--p", "3"])
    assert exc.value.code == 1
    assert "--poly" in capsys.readouterr().err


def test_output_is_byte_identical(capsys):
    argv = ["witness", "--p", "5", "--r", "1/2", "--window", "1", "--depth", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_corpus_single_criterion(capsys):
    code, doc, err = run_json(capsys, "corpus", "--criteria", "10")
    assert code == 0
    assert doc["result"]["criteria"][0]["passed"]
    assert "PASS criterion 10" in err


def write_curve_file(path, h, forms):
    path.write_text(json.dumps({"p": 7, "precision": 20, "h-coefficients": h, "forms": [{"m": 1, "numerator-coefficients": f} for f in forms]}))
    return str(path)


def test_pseudonorm_from_curve_file(tmp_path, capsys):
    curve_file = write_curve_file(tmp_path / "c.json", [-1, 0, 0, 0, 0, 1], [[1], [0, 1]])
    _, from_file, _ = run_json(capsys, "pseudonorm", "--curve", curve_file, "--form", "1", "--depth", "3")
    _, inline, _ = run_json(capsys, "pseudonorm", "--p", "7", "--h=-1,0,0,0,0,1", "--form", "0,1", "--depth", "3")
    assert from_file["result"] == inline["result"]


def test_pseudonorm_form_index_out_of_range(tmp_path, capsys):
    curve_file = write_curve_file(tmp_path / "c.json", [-1, 0, 0, 0, 0, 1], [[1]])
    code, _, err = run(capsys, "pseudonorm", "--curve", curve_file, "--form", "2")
    assert code == 1 and "--form" in err


def test_equimeasure_from_files(tmp_path, capsys):
    left = write_curve_file(tmp_path / "l.json", [-1, 0, 0, 0, 0, 1], [[1], [0, 1]])
    right = write_curve_file(tmp_path / "r.json", [-1, 0, 0, 0, 0, 1], [[7], [0, 1]])
    code, doc, _ = run_json(capsys, "equimeasure", "--left", left, "--right", right, "--depth", "1")
    assert code == 0 and doc["result"]["verdict"] == "NOT-EQUAL"


def test_equimeasure_needs_both_files(tmp_path, capsys):
    left = write_curve_file(tmp_path / "l.json", [-1, 0, 0, 0, 0, 1], [[1]])
    code, _, err = run(capsys, "equimeasure", "--left", left)
    assert code == 1 and "--right" in err


def test_fourier_from_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"p": 3, "pieces": [{"center": "0", "level": 1, "value": "1"}]}))
    _, from_file, _ = run_json(capsys, "fourier", "--fn", str(path), "--tau", "1/3")
    _, inline, _ = run_json(capsys, "fourier", "--p", "3", "--coset", "0:1:1", "--tau", "1/3")
    assert from_file["result"] == inline["result"]


def test_fourier_bad_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "fourier", "--fn", str(path), "--tau", "1")
    assert code == 1 and "--fn" in err
