from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest

from indepforge.cli import main
from indepforge.instance import dumps
from indepforge.testkit import GeneratorConfig, generate_instance

REPORT_SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "report-schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out) if out.strip().startswith("{") else None
    if report is not None:
        jsonschema.validate(report, REPORT_SCHEMA)
    return code, report


def write(tmp_path, doc, name="inst.json"):
    p = tmp_path / name
    p.write_text(dumps(doc))
    return str(p)


def test_torsion_ratio_bundled(capsys):
    code, rep = run(capsys, "torsion-ratio", "--in", "bundled:paper_defaut_positif")
    assert code == 0 and rep["result"]["torsion_ratio"] == "2/3"


def test_strong_indep_false_is_exit_zero(capsys):
    code, rep = run(capsys, "strong-indep", "--in", "bundled:truncated_line")
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["verdict"] is False and rep["result"]["failing_power"] == 2
    code, rep = run(capsys, "strong-indep", "--in", "bundled:truncated_line", "--ideal", "x^4")
    assert rep["result"]["verdict"] is True


def test_certify_desmit(capsys):
    code, rep = run(capsys, "certify", "--in", "bundled:flat_desmit", "--route", "desmit")
    assert code == 0 and rep["result"]["free"] is True


def test_certify_balanced_and_failure(capsys):
    code, rep = run(capsys, "certify", "--in", "bundled:balanced_line")
    assert code == 0 and rep["result"]["free"] is True
    code, rep = run(capsys, "certify", "--in", "bundled:balanced_line", "--order", "x", "y")
    assert code == 0 and rep["status"] == "hypothesis-failed"


def test_koszul_homology_zero_sequence(capsys):
    code, rep = run(capsys, "koszul-homology", "--in", "bundled:truncated_line", "--sequence", "0", "0")
    assert code == 0 and rep["result"]["homology"] == [8, 16, 8]


def test_commands_on_bundled_instances(capsys):
    for command, extra in [("edim", []), ("ci-test", []), ("indep", ["--sequence", "x^3"]),
                           ("relations", ["--ideal", "x^6"]), ("koszul-indep", ["--sequence", "x^7"]),
                           ("liaison", ["--x", "x^3", "--u", "x"]), ("fitting", ["--x", "x^3", "--u", "x"]),
                           ("oracle-free", []), ("census", ["--length", "1", "--mode", "greedy"])]:
        code, rep = run(capsys, command, "--in", "bundled:truncated_line", *extra)
        assert code == 0 and rep["status"] == "ok", (command, rep)


def test_census_bundled(capsys):
    code, rep = run(capsys, "census", "--in", "bundled:census_line")
    assert code == 0 and rep["result"]["max_strongly_independent"] == 1


def test_invalid_input_exit_one(capsys, tmp_path):
    code, rep = run(capsys, "indep", "--in", "bundled:truncated_line", "--sequence", "q")
    assert code == 1 and rep["pointer"] == "/command/sequence/0"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, rep = run(capsys, "edim", "--in", str(bad))
    assert code == 1 and rep["status"] == "invalid"
    code, rep = run(capsys, "edim", "--in", str(tmp_path / "missing.json"))
    assert code == 1


def test_cap_exit_two(capsys, tmp_path):
    doc = {"schema": "indepforge/1", "field": "GF(101)",
           "rings": {"A": {"vars": ["x", "y"], "truncation": 3}},
           "modules": {"M": {"ring": "A", "kind": "algebra"}},
           "command": {"name": "census", "module": "M", "length": 2}}
    code, rep = run(capsys, "census", "--in", write(tmp_path, doc))
    assert code == 2 and rep["status"] == "cap-exceeded"
    code, rep = run(capsys, "edim", "--in", write(tmp_path, doc), "--max-dim", "3")
    assert code == 2


def test_precondition_failed_is_exit_zero(capsys):
    code, rep = run(capsys, "liaison", "--in", "bundled:truncated_line", "--x", "x^7", "--u", "x")
    assert code == 0 and rep["status"] == "precondition-failed"


def test_reports_are_deterministic(capsys, tmp_path):
    path = write(tmp_path, generate_instance(GeneratorConfig(seed=9), "liaison"))
    a = run(capsys, "liaison", "--in", path, "--seed", "3")
    b = run(capsys, "liaison", "--in", path, "--seed", "3")
    assert a == b and a[0] == 0


def test_out_file_and_timing(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = main(["edim", "--in", "bundled:truncated_line", "--out", str(out), "--timing"])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["result"]["edim"] == 1 and rep["timing_seconds"] >= 0
    jsonschema.validate(rep, REPORT_SCHEMA)


def test_generate(capsys, tmp_path):
    assert main(["generate", "--kind", "square-zero", "--seed", "42"]) == 0
    first = capsys.readouterr().out
    assert main(["generate", "--kind", "square-zero", "--seed", "42"]) == 0
    assert capsys.readouterr().out == first
    assert main(["generate"]) == 1


def test_batch(capsys, tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    for seed in range(3):
        write(src, generate_instance(GeneratorConfig(seed=seed), "random-module"), f"m{seed}.json")
    (src / "broken.json").write_text("{}")
    code = main(["torsion-ratio", "--batch", str(src), "--out", str(tmp_path / "out"), "--workers", "2"])
    assert code == 1
    reports = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert reports == ["broken.report.json", "m0.report.json", "m1.report.json", "m2.report.json"]
    for p in (tmp_path / "out").iterdir():
        jsonschema.validate(json.loads(p.read_text()), REPORT_SCHEMA)
