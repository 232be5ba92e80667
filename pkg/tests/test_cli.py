import io
import json
import subprocess
import sys

import pytest

from causeway.cli import run_cli


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_eval_and_intervene():
    code, out, _ = run("eval", "examples/cake.model")
    assert code == 0 and "Cake = 1" in out.splitlines()
    code, out, _ = run("eval", "examples/cake.model", "--exo", "U3=1")
    assert "Cake = 0" in out
    code, out, _ = run("intervene", "examples/cake.model", "--set", "Batter=0")
    assert code == 0 and "Cake = 0" in out and out.startswith("intervention: Batter=0")
    code, out, _ = run("eval", "examples/divzero.model", "--json")
    assert json.loads(out)["values"]["F"] == "bot"


def test_cause_orgate():
    code, out, _ = run("cause", "examples/orgate.model", "--effect", "Y=1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "actual causes of Y=1 (max size 3): 2"
    assert lines[1].strip() == "{A=1} causes Y=1  witness W={B:=0} x'={A:=0}"
    assert lines[2].strip() == "{B=1} causes Y=1  witness W={A:=0} x'={B:=0}"


def test_cause_single_query_and_graphs():
    code, _, _ = run("cause", "examples/orgate.model", "--effect", "Y=1", "--cause", "A=1,B=1")
    assert code == 0
    code, out, _ = run("cause", "examples/vacuous.model", "--effect", "Y=0", "--cause", "X=1")
    assert code == 1 and "not a weak cause" in out
    code, out, _ = run("cause", "examples/cake.json", "--effect", "cake=1", "--max-size", "1", "--json")
    causes = json.loads(out)["actual_causes"]
    assert {"flour": "1"} in [c["cause"] for c in causes]


def test_cause_env_bound(monkeypatch):
    monkeypatch.setenv("CAUSEWAY_MAX_CAUSE_SIZE", "1")
    _, out, _ = run("cause", "examples/orgate.model", "--effect", "Y=1")
    assert "(max size 1)" in out


def test_infer_and_audit():
    code, out, _ = run("infer", "examples/cake.json")
    assert code == 0 and "wasTriggeredBy(bake, mix)" in out.splitlines()
    _, out, _ = run("infer", "examples/chain.json", "--derivations")
    assert "wasDerivedFrom(Z, Y)    # derived: wasGeneratedBy(Z, dbl), used(dbl, Y)" in out
    code, out, _ = run("audit", "examples/vacuous.json", "--interp", "examples/vacuous.interp")
    assert code == 1
    unsound = out[out.index("UNSOUND"):out.index("MISSED")]
    assert "wasDerivedFrom(y, x)" in unsound
    code, out, _ = run("audit", "examples/cake.json", "--json")
    assert code == 0 and json.loads(out)["unsound"]["used"] == []


def test_check_and_power():
    code, out, _ = run("check", "examples/powsem.sem", "--target", "examples/pow.model", "--grade", "global")
    assert code == 1 and "counterexample:" in out
    code, _, _ = run("check", "examples/powsem.sem", "--grade", "local")
    assert code == 0
    code, out, _ = run("check", "examples/chain_const.sem", "--grade", "local", "--json")
    doc = json.loads(out)
    assert code == 1 and doc["counterexample"]["tau"] == {"Y": "0"}
    code, out, _ = run("power", "examples/powsem.sem", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["reflexive"] and not doc["total"] and doc["points"] == 125
    _, out, _ = run("power", "examples/chain_const.sem", "--compare", "examples/chain_exact.sem")
    assert "less-or-equal" in out
    _, out, _ = run("power", "examples/chain_exact.sem", "--dump")
    assert "(3) ~> (5)" in out


def test_validate_and_dot():
    code, out, _ = run("validate", "examples/cake.json")
    assert code == 0 and "is_sorted: yes" in out
    code, out, _ = run("export-dot", "examples/cake.json")
    assert out.startswith('digraph "cake"')
    code, out, _ = run("export-dot", "examples/cake.model")
    assert '"U1" -> "Mix";' in out


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["eval", "missing.model"],
    ["eval", "examples/orgate.model", "--exo", "A=1"],
    ["cause", "examples/orgate.model", "--effect", "Y=0"],
    ["cause", "examples/orgate.model", "--effect", "Y=1", "--max-size", "0"],
    ["check", "examples/powsem.sem", "--grade", "sideways"],
    ["power", "examples/powsem.sem", "--budget", "10"],
    ["audit", "examples/cake.model"],
])
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_seed_is_accepted():
    assert run("--seed", "7", "eval", "examples/orgate.model")[0] == 0
    assert run("eval", "examples/orgate.model", "--seed", "7")[0] == 0


def test_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "causeway", "audit", "examples/cake.json", "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
