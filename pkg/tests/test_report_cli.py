import csv
import io
import json

import numpy as np
import pytest

from harnack_lab import cli, report, tensors

SMALL = {"models": ["flat(2)", "cigar"], "checks": ["evolution", "q_normalization"], "dims": [3, 4], "seed": 4}


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_empty_report_passes():
    doc = report.run_report({"checks": []})
    assert doc["passed"] and doc["results"] == [] and doc["criteria"] == {}


@pytest.mark.parametrize(
    "cfg",
    [{"bogus": 1}, {"checks": ["nope"]}, {"N_list": [1e3]}, {"seed": -1}, {"models": ["torus"]}, {"tolerances": {"slope": 0}}],
)
def test_invalid_configs(cfg):
    with pytest.raises(report.ConfigError):
        report.validate_config(cfg)


def test_config_defaults_are_merged():
    cfg = report.validate_config({"tolerances": {"slope": 0.1}})
    assert cfg["tolerances"]["slope"] == 0.1
    assert cfg["tolerances"]["rmeq"] == 1e-6
    assert cfg["models"] == ["flat(2)", "sphere(3,1)", "hyperbolic(2)", "cigar"]


def test_report_is_deterministic_and_thread_independent():
    a = report.run_report(SMALL, workers=1)
    b = report.run_report(SMALL, workers=3)
    assert a["passed"]
    assert a["digest"] == b["digest"]
    assert a["results"] == b["results"]
    assert report.results_digest(a) == a["digest"]
    assert {r["criterion"] for r in a["results"]} == {4, 7}


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("HARNACK_LAB_THREADS", "3")
    assert report.thread_count() == 3
    monkeypatch.setenv("HARNACK_LAB_THREADS", "many")
    with pytest.raises(report.ConfigError):
        report.thread_count()


def test_to_jsonable():
    doc = report.to_jsonable({"a": np.float64(1.5), "b": np.arange(2), "c": np.bool_(True), 1: float("inf")})
    assert doc == {"a": 1.5, "b": [0, 1], "c": True, "1": "inf"}
    json.dumps(doc)


def test_rows_to_csv():
    text = report.rows_to_csv([{"a": 1, "b": {"c": 2}}, {"a": 3, "d": [1, 2]}])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0]["b.c"] == "2" and rows[1]["d"] == "[1, 2]"


def test_cli_report_roundtrip(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(SMALL))
    code, out, _ = run_cli(["report", "--config", str(path)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["digest"] == report.run_report(SMALL)["digest"]


def test_cli_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"checks": ["nope"]}))
    assert run_cli(["report", "--config", str(bad)], capsys)[0] == 2
    assert run_cli(["report", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run_cli(["harnack", "--model", "torus", "--t", "0.1"], capsys)[0] == 2
    assert run_cli(["harnack", "--model", "sphere(3,1)", "--t", "0.5"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["cone", "--dim", "4"])
    assert exc.value.code == 2


def test_cli_models_list_csv(capsys):
    code, out, _ = run_cli(["models", "list", "--csv"], capsys)
    assert code == 0
    labels = [r["label"] for r in csv.DictReader(io.StringIO(out))]
    assert labels == ["flat(2)", "sphere(3,1)", "hyperbolic(2)", "cigar"]


def test_cli_cone_membership(tmp_path, capsys):
    path = tmp_path / "form.json"
    path.write_text(json.dumps(tensors.form_to_json(-tensors.identity_form(4))))
    code, out, _ = run_cli(["cone", "--dim", "4", "--k", "1", "membership", "--input", str(path), "--restarts", "4"], capsys)
    assert code == 0
    doc = json.loads(out)[0]
    assert doc["status"] == "outside" and abs(doc["margin"] + 1) < 1e-10
    assert run_cli(["cone", "--dim", "5", "--k", "1", "membership", "--input", str(path)], capsys)[0] == 2


def test_cli_boundary_sample_and_ode(tmp_path, capsys):
    code, out, _ = run_cli(["cone", "--dim", "3", "--k", "1", "boundary-sample", "--seed", "2"], capsys)
    assert code == 0
    sample = json.loads(out)[0]
    path = tmp_path / "form.json"
    path.write_text(json.dumps(sample["form"]))
    code, out, _ = run_cli(["ode-run", "--dim", "3", "--input", str(path), "--duration", "0.05", "--step", "0.01"], capsys)
    assert code == 0
    assert json.loads(out)[0]["max_bianchi_drift"] < 1e-10


def test_cli_harnack_and_out_file(tmp_path, capsys):
    out_path = tmp_path / "h.json"
    code, _, _ = run_cli(["harnack", "--model", "sphere(3,1)", "--t", "0.1", "--restarts", "4", "--out", str(out_path)], capsys)
    assert code == 0
    row = json.loads(out_path.read_text())[0]
    assert abs(row["trace"]["ric_tt"] - 250 / 3) < 1e-6


def test_cli_soliton_defect(capsys):
    code, out, _ = run_cli(["soliton-defect", "--model", "cigar", "--t", "0.5", "--points", "2"], capsys)
    assert code == 0
    row = json.loads(out)[0]
    assert row["worst_slope_error"] <= 0.05


def test_cli_evolution_and_limit(capsys):
    code, out, _ = run_cli(["evolution-residual", "--eq", "rmeq", "--model", "cigar", "--points", "3"], capsys)
    assert code == 0 and json.loads(out)[0]["max"] < 1e-6
    code, out, _ = run_cli(["limit-check", "--model", "sphere(3,1)", "--t", "0.1"], capsys)
    assert code == 0
    assert abs(json.loads(out)[0]["Ric_inf_tt"] - 250 / 3) < 1e-9
