import io
import json
import subprocess
import sys

import pytest

from bosy.cli import main
from bosy.emit import EMITTERS
from bosy.search import Options, SearchStrategy, run_dual
from bosy.specio import load_spec
from conftest import SUITE_DIR
from test_emit import FIG4B
from test_external import SAT_SOLVER

ARBITER = str(SUITE_DIR / "arbiter_2.json")


def run(argv, capsys):
    status = main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def test_arbiter_realizable(capsys):
    assert run([ARBITER], capsys)[:2] == (0, "REALIZABLE\n")


def test_arbiter_smv(capsys):
    status, out, _ = run(["--synthesize", "--target", "smv", ARBITER], capsys)
    assert status == 0
    assert out == "REALIZABLE\n" + FIG4B


@pytest.mark.parametrize("target", sorted(EMITTERS))
def test_artifact_is_exactly_the_emitted_document(capsys, target):
    status, out, _ = run(["--synthesize", "--backend", "sat", "--target", target, "-vv", ARBITER], capsys)
    expected = EMITTERS[target](run_dual(load_spec(ARBITER), SearchStrategy(), Options(backend="sat")).machine)
    assert out == "REALIZABLE\n" + expected


def test_environment_player_on_false(capsys):
    path = str(SUITE_DIR / "guarantee_false.json")
    assert run(["--player", "environment", path], capsys)[:2] == (0, "REALIZABLE\n")
    assert run(["--player", "system", "--max-bound", "2", path], capsys)[:2] == (2, "UNKNOWN\n")


def test_unrealizable_prints_counter_strategy(capsys):
    status, out, _ = run(["--synthesize", "--target", "smv", str(SUITE_DIR / "eventually_input.json")], capsys)
    assert status == 1
    assert out.startswith("UNREALIZABLE\nMODULE main\n")
    assert "r := FALSE;" in out


def test_unknown(capsys):
    assert run(["--max-bound", "1", "--strategy", "linear", ARBITER], capsys)[:2] == (2, "UNKNOWN\n")


@pytest.mark.parametrize("argv", [
    ["--backend", "smt", ARBITER],
    ["--bogus", ARBITER],
    [],
    ["--min-bound", "0", ARBITER],
    ["--min-bound", "3", "--max-bound", "2", ARBITER],
    ["--optimize", "some", ARBITER],
])
def test_bad_flags(capsys, argv):
    status, out, err = run(argv, capsys)
    assert status == 3 and out == "" and "error" in err


def test_pipeline_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"semantics": "mealy", "inputs": [], "outputs": [], "guarantees": ["x"]}))
    status, out, err = run([str(bad)], capsys)
    assert status == 4 and out == "" and "undeclared atom" in err
    status, _, err = run([str(tmp_path / "missing.json")], capsys)
    assert status == 4
    status, _, err = run(["--backend", "sat", "--external-sat", "/nonexistent/solver", ARBITER], capsys)
    assert status == 4 and "cannot start" in err


def test_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO((SUITE_DIR / "response.json").read_text()))
    assert run(["-"], capsys)[:2] == (0, "REALIZABLE\n")


def test_environment_variable_defaults(capsys, monkeypatch, make_script):
    monkeypatch.setenv("BOSY_SAT_CMD", "/nonexistent/solver")
    status, _, err = run(["--backend", "sat", ARBITER], capsys)
    assert status == 4 and "/nonexistent/solver" in err
    monkeypatch.setenv("BOSY_SAT_CMD", make_script("sat.py", SAT_SOLVER))
    assert run(["--backend", "sat", ARBITER], capsys)[:2] == (0, "REALIZABLE\n")


def test_optimize_none(capsys):
    assert run(["--optimize", "none", "--synthesize", ARBITER], capsys)[0] == 0


def test_module_entry_point_keeps_logs_off_stdout():
    proc = subprocess.run([sys.executable, "-m", "bosy", "-v", "--synthesize", "--target", "aiger", ARBITER],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "REALIZABLE"
    assert proc.stdout.splitlines()[1].startswith("aag ")
    assert "bound" in proc.stderr
