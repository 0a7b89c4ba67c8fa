import io
import subprocess
import sys

import pytest

from conftest import PROP1, PROP2, PROP3
from pnta.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check_true_and_false():
    code, text = run("check", "fischer_reduced", PROP2, "--sizes", "3")
    assert code == 0 and "verdict: true" in text
    code, text = run("check", "fischer_reduced", PROP3, "--sizes", "2")
    assert code == 1 and "counterexample:" in text and "** cycle" in text


def test_check_sweep_fail_fast():
    code, text = run("check", "fischer_reduced", PROP3, "--fail-fast")
    assert code == 1
    assert "first failing size: (1)" in text


def test_usage_and_parse_errors(tmp_path, capsys):
    assert run("check", "fischer_reduced")[0] == 2
    assert run("check", "fischer_reduced", "forall i:P . E F[>=0] Nowhere(i)", "--sizes", "2")[0] == 2
    assert run("check", "fischer_reduced", "forall i:P . Afin F[>=0] CS_mypid(i)")[0] == 2
    assert run("check", "no_such_model", PROP1)[0] == 2
    bad = tmp_path / "bad.pnta"
    bad.write_text("template T { state a; }\n")
    assert run("check", str(bad), "E F[>=0] a(1)", "--sizes", "1")[0] == 2
    assert run("check", "fischer_reduced", PROP1, "--sizes", "x")[0] == 2


def test_engine_limitation():
    code, _ = run("check", "fischer_reduced", PROP1, "--sizes", "2", "--engine", "discrete")
    assert code == 3
    code, _ = run("check", "fischer_proc", "forall i:P . E F[>=0] CS(i)", "--sizes", "2")
    assert code == 3
    code, _ = run("check", "fischer_reduced", "forall i:P . E F[==3] CS_mypid(i)", "--sizes", "2", "--imitl-strict")
    assert code == 3


def test_cutoff_command():
    code, text = run("cutoff", "fischer_reduced", PROP1)
    assert code == 0
    assert "cutoff: (9)" in text and "sizes to check: 9" in text


def test_simulate_command():
    code, text = run("simulate", "fischer_reduced", "--sizes", "2", "--steps", "8", "--seed", "5")
    assert code == 0 and "replay: ok" in text and text.startswith("# run:")


def test_abstract_command(tmp_path, full):
    out = tmp_path / "abs.pnta"
    code, _ = run("abstract", "fischer_proc", "--template", "P", "--var", "v", "--prune", "-o", str(out))
    assert code == 0
    from pnta.textio import load_model
    assert load_model(out).templates == full.templates


def test_lemma_command(tmp_path):
    code, text = run("lemma-test", "--suite", "mono", "--trials", "3", "--seed", "9", "--dump", str(tmp_path))
    assert code == 0
    assert text.rstrip().splitlines()[-1] == "violations=0 trials=3 seed=9"


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "pnta.cli", "cutoff", "fischer_reduced", PROP2],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and "(9)" in proc.stdout
