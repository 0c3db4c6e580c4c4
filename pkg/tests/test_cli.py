import json

import pytest

from normlift.cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_REJECT, EXIT_USAGE, run


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def cyclotomic_doc(capsys):
    code, out, _ = invoke(capsys, "cyclotomic", "--p", "3", "--exponents", "4,7,28", "--N", "8", "--M", "16")
    assert code == EXIT_OK
    return json.loads(out)


def test_circulant(capsys):
    code, out, _ = invoke(capsys, "circulant", "--weights", "1,1,1")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["determinant"] == "0"
    assert payload["class"] == "TraceLine"


def test_circulant_of_composite_order_has_no_class(capsys):
    code, out, _ = invoke(capsys, "circulant", "--weights", "0,1,0,1")
    assert code == EXIT_OK
    assert "class" not in json.loads(out)


def test_classify_needs_prime_order(capsys):
    code, _, err = invoke(capsys, "classify-weights", "--weights", "1,0,0,0")
    assert code == EXIT_USAGE
    assert err.startswith("Error:")


def test_search_singular(capsys):
    code, out, _ = invoke(capsys, "search-singular", "--d", "4", "--bound", "1")
    assert code == EXIT_OK
    assert json.loads(out)["vector"] == ["0", "0", "1", "1"]
    code, out, _ = invoke(capsys, "search-singular", "--d", "3", "--bound", "2")
    assert json.loads(out)["vector"] is None


@pytest.mark.parametrize("argv", [
    ["circulant", "--weights", "1,x"],
    ["circulant", "--weights", "1,-1"],
    ["circulant", "--weights", "1,2", "--d", "3"],
    ["search-singular", "--d", "1", "--bound", "2"],
    ["search-singular", "--d", "3"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = invoke(capsys, *argv)
    assert code == EXIT_USAGE


def test_generated_cyclotomic_lift_is_accepted(capsys, cyclotomic_doc):
    assert cyclotomic_doc["field"]["N"] == "8"
    assert [e["label"] for e in cyclotomic_doc["elements"]] == ["4", "7", "28"]
    code, out, _ = invoke(capsys, "check", "--json", json.dumps(cyclotomic_doc))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["verdict"] == "Accept"
    assert report["header"].startswith("consistent at precision")


def test_check_reads_input_file(capsys, workdir, cyclotomic_doc):
    path = workdir / "lift.json"
    path.write_text(json.dumps(cyclotomic_doc))
    code, _, _ = invoke(capsys, "check", "--input", str(path), "--workers", "1")
    assert code == EXIT_OK


def test_perturbed_lift_is_rejected(capsys, cyclotomic_doc):
    coeffs = cyclotomic_doc["elements"][0]["F"]["coeffs"]
    coeffs[2] = {"coords": ["9"], "prec": coeffs[2]["prec"]}
    code, out, _ = invoke(capsys, "check", "--json", json.dumps(cyclotomic_doc))
    assert code == EXIT_REJECT
    assert json.loads(out)["verdict"] == "Reject"


def test_check_output_is_deterministic(capsys, cyclotomic_doc):
    text = json.dumps(cyclotomic_doc)
    _, first, _ = invoke(capsys, "check", "--json", text)
    _, second, _ = invoke(capsys, "check", "--json", text)
    assert first == second


def test_meta_and_human_format(capsys, cyclotomic_doc):
    text = json.dumps(cyclotomic_doc)
    _, out, _ = invoke(capsys, "check", "--json", text, "--meta")
    assert "version" in json.loads(out)["meta"]
    _, out, _ = invoke(capsys, "check", "--json", text, "--format", "human")
    assert "verdict: Accept" in out


@pytest.mark.parametrize("text", ["{", '{"field": {"p": "3", "N": "8"}, "P": ["0"], "extra": 1}'])
def test_bad_documents(capsys, text):
    code, _, err = invoke(capsys, "check", "--json", text)
    assert code == EXIT_USAGE
    assert "Error:" in err


def test_ambiguous_newton_polygon(capsys):
    doc = {"field": {"p": "3", "N": "8"},
           "series": [{"coords": ["1"], "prec": "8"}, {"coords": ["0"], "prec": "1"}, "27"]}
    code, _, _ = invoke(capsys, "newton-polygon", "--json", json.dumps(doc))
    assert code == EXIT_INCONCLUSIVE


def test_newton_polygon(capsys):
    doc = {"field": {"p": "3", "N": "8"}, "series": ["3", "-1", "0", "1"]}
    code, out, _ = invoke(capsys, "newton-polygon", "--json", json.dumps(doc))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert [s["slope"] for s in payload["segments"]] == ["-1/1", "0/1"]


def test_fixed_point(capsys):
    doc = {"field": {"p": "3", "N": "8"}, "P": ["9", "3", "0", "1", "0", "0"]}
    code, out, _ = invoke(capsys, "fixed-point", "--json", json.dumps(doc))
    assert code == EXIT_OK
    assert json.loads(out)["valuation"] == "2"


def test_norm_of_variable(capsys):
    doc = {"field": {"p": "3", "N": "8"}, "P": ["0", "3", "3", "1", "0", "0", "0", "0"]}
    code, out, _ = invoke(capsys, "norm", "--json", json.dumps(doc), "--polynomial")
    assert code == EXIT_OK
    coeffs = json.loads(out)["norm"]["coeffs"]
    assert [c["coords"] for c in coeffs[:3]] == [["0"], ["1"], ["0"]]


def test_log_reports_eigen_residuals(capsys, cyclotomic_doc):
    code, out, _ = invoke(capsys, "log", "--json", json.dumps(cyclotomic_doc))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["identity_residual"]["ok"]
    assert payload["denominator_bound_ok"]
    assert all(entry["residual"]["ok"] for entry in payload["eigen"])


def test_lubin_tate_endomorphism(capsys):
    code, out, _ = invoke(capsys, "lubin-tate", "--p", "3", "--N", "6", "--M", "8", "--endomorphism", "2")
    assert code == EXIT_OK
    assert json.loads(out)["series"]["coeffs"][1]["coords"] == ["2"]
    code, _, _ = invoke(capsys, "lubin-tate", "--p", "3", "--M", "8")
    assert code == EXIT_USAGE


def test_config_updates_settings_file(capsys, workdir):
    code, out, _ = invoke(capsys, "config", "--set", "precision=6")
    assert code == EXIT_OK
    assert json.loads(out)["settings"]["precision"] == "6"
    assert (workdir / "normlift.ini").exists()
    _, out, _ = invoke(capsys, "cyclotomic", "--p", "3", "--exponents", "4", "--M", "8")
    assert json.loads(out)["field"]["N"] == "6"
    code, _, _ = invoke(capsys, "config", "--set", "colour=blue")
    assert code == EXIT_USAGE


def test_selftest(capsys):
    code, out, _ = invoke(capsys, "selftest", "--seed", "1", "--count", "1")
    assert code == EXIT_OK
    assert json.loads(out)["passed"] is True
