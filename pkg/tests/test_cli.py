from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from mixkoszul.cli import main, payload, run

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# fixture name -> (command, property for verify)
CORPUS = {
    "cusp": ("verify", "thm01"),
    "node": ("verify", "thm02"),
    "a1_surface": ("chi", None),
    "space_curve": ("mixed", None),
    "cusp_icis": ("index", None),
    "node_icis": ("index", None),
    "a1_surface_icis": ("index", None),
    "space_curve_icis": ("index", None),
    "ideal": ("colength", None),
    "ideal_infinite": ("colength", None),
    "monomial_ideal": ("sb", None),
    "line_pair": ("mixed", None),
    "plane_max": ("verify", "reduction-423"),
    "param_length": ("verify", "cm-length-1210"),
    "param_vanishing": ("param-mult", None),
    "additivity": ("verify", "additivity-129"),
    "delta": ("verify", "delta-23"),
    "bad_parse": ("colength", None),
    "bad_variable": ("colength", None),
    "not_tangent": ("index", None),
}


def argv_for(name):
    command, prop = CORPUS[name]
    path = str(FIXTURES / f"{name}.json")
    return [command, prop, path] if prop else [command, path]


def test_corpus_is_complete():
    names = {p.name[: -len(".expected.json")] for p in FIXTURES.glob("*.expected.json")}
    assert names == set(CORPUS)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_fixture_matches_expected_report(name):
    command, prop = CORPUS[name]
    report, code = run(command, str(FIXTURES / f"{name}.json"), prop)
    expected = json.loads((FIXTURES / f"{name}.expected.json").read_text())
    assert payload(report) == expected
    assert code == {"ok": 0}.get(report["status"], code)


@pytest.mark.parametrize("name, code", [("bad_parse", 2), ("bad_variable", 2), ("not_tangent", 1), ("ideal", 0)])
def test_exit_codes(name, code, capsys):
    assert main(argv_for(name)) == code
    report = json.loads(capsys.readouterr().out)
    assert set(report) >= {"status", "command", "seed", "timing_ms"}
    assert ("error" in report) == (code != 0)


def test_parse_error_reports_position(capsys):
    main(argv_for("bad_parse"))
    err = json.loads(capsys.readouterr().out)["error"]
    assert err["code"] == "PARSE_ERROR"
    assert "position" in err["context"]


def test_unknown_property(capsys):
    assert main(["verify", "no-such-property", str(FIXTURES / "cusp.json")]) == 2
    assert json.loads(capsys.readouterr().out)["error"]["code"] == "INPUT_ERROR"


def test_missing_file(tmp_path, capsys):
    assert main(["colength", str(tmp_path / "missing.json")]) == 2
    assert json.loads(capsys.readouterr().out)["error"]["code"] == "INPUT_ERROR"


def test_invalid_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["colength", str(bad)]) == 2
    assert json.loads(capsys.readouterr().out)["error"]["code"] == "PARSE_ERROR"


def test_pretty_output(capsys):
    main(["colength", "--pretty", str(FIXTURES / "ideal.json")])
    out = capsys.readouterr().out
    assert out.startswith("{\n  ")
    assert json.loads(out)["result"] == 1


def test_nu_flag_is_used(capsys):
    main(["chi", "--nu", "2", str(FIXTURES / "a1_surface.json")])
    assert json.loads(capsys.readouterr().out)["result"]["nu"] == 2


def test_seed_flag_is_echoed(capsys):
    main(["alt-mult", "--seed", "3", str(FIXTURES / "node.json")])
    report = json.loads(capsys.readouterr().out)
    assert report["seed"] == 3 and report["status"] == "ok"
    assert report["result"]["value"] == 0


def _run_process(args, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run([sys.executable, "-m", "mixkoszul.cli", *args], capture_output=True, text=True, env=env)
    report = json.loads(proc.stdout)
    report.pop("timing_ms")
    return proc.returncode, json.dumps(report, sort_keys=True)


@pytest.mark.parametrize("name", ["node", "space_curve_icis", "monomial_ideal"])
def test_reports_identical_across_processes(name):
    first = _run_process(argv_for(name), 1)
    assert _run_process(argv_for(name), 12345) == first
