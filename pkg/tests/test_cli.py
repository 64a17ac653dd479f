import json
import subprocess
import sys

import mpmath
import pytest

from k2hyper import cli
from k2hyper.errors import InconclusiveError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_eval_origin(capsys):
    code, doc = run_json(capsys, "eval", "--point", "0,0,0,0")
    assert code == 0
    assert doc["results"]["value"] == 1.0
    assert doc["policy"]["max_total_degree"] == 30


def test_eval_axis_reduction(capsys):
    code, doc = run_json(capsys, "eval", "--params", "0.3,0.5,0.7,1.5,2.5,3.5,4.5",
                         "--point", "0.08,0,0,0")
    assert code == 0
    red = doc["results"]["axis_reduction"]
    assert red["axis"] == "x" and red["rel_diff"] <= 1e-12
    assert doc["results"]["value"] == pytest.approx(float(mpmath.hyp2f1(0.3, 0.5, 1.5, 0.08)), rel=1e-12)


def test_eval_rational_params_echoed(capsys):
    _, doc = run_json(capsys, "eval", "--params", "1/3,1/5,1/7,3/2,5/2,7/2,9/2",
                      "--point", "0.01,0.02,0.03,0.04")
    assert doc["inputs"]["params"]["a"] == 1 / 3
    assert doc["inputs"]["point"] == [0.01, 0.02, 0.03, 0.04]


@pytest.mark.parametrize("argv", [
    ["eval", "--point", "0.1,0.05,0.02,0.03"],
    ["eval", "--point", "0.1,0.05,0.02,0.03", "--format", "table"],
    ["pde-check", "--solution", "2", "--samples", "2"],
    ["independence", "--max-degree", "12"],
    ["opcheck", "--form", "thm-3.8", "--order", "3"],
    ["identity", "--id", "3.11", "--n", "2", "--m", "1"],
])
def test_repeat_runs_are_byte_identical(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second


def test_timing_is_opt_in(capsys):
    _, doc = run_json(capsys, "eval", "--point", "0.1,0,0,0")
    assert "wall_time_s" not in doc
    _, doc = run_json(capsys, "eval", "--point", "0.1,0,0,0", "--timing")
    assert doc["wall_time_s"] >= 0


def test_bad_input_exit_codes(capsys):
    assert run(capsys, "eval", "--point", "0.1,0.2")[0] == 2
    assert run(capsys, "eval", "--point", "0,0,0,0", "--params", "1,2,x,4,5,6,7")[0] == 2
    code, doc = run_json(capsys, "eval", "--point", "0,0,0,0", "--max-degree", "65")
    assert code == 2 and "cap" in doc["error"]
    code, doc = run_json(capsys, "eval", "--point", "0.1,0,0,0", "--params", "1,1,1,-1,1,1,1")
    assert code == 2 and doc["error"].startswith("PoleError")


def test_pde_check_probe_constant(capsys):
    code, doc = run_json(capsys, "pde-check", "--solution", "1", "--probe-constant", "1",
                         "--samples", "3")
    assert code == 1
    row = doc["results"]["rows"][0]
    a, b, c = 0.3, 0.5, 0.7
    assert row["residuals"] == pytest.approx([a * b, a * b, a * c, a * b], rel=1e-15)


def test_pde_check_single_solution_passes(capsys):
    code, doc = run_json(capsys, "pde-check", "--solution", "16", "--samples", "2")
    assert code == 0
    assert doc["results"]["rows"][0]["max_residual"] <= 1e-7
    assert doc["inputs"]["seed"] == cli.DEFAULT_SEED


def test_pde_check_integer_e_flags(capsys):
    code, doc = run_json(capsys, "pde-check", "--params", "0.3,0.5,0.7,1,0.45,0.6,0.75",
                         "--solution", "2", "--samples", "1")
    assert any("integer e_i" in w for w in doc["warnings"])
    assert "coincides with u_1" in doc["results"]["rows"][0]["degenerate"]


def test_pde_check_pole_is_input_error(capsys):
    # e1 = 2 turns the shifted denominator 2 - e1 into 0
    code, doc = run_json(capsys, "pde-check", "--params", "0.3,0.5,0.7,2,0.45,0.6,0.75",
                         "--solution", "2", "--samples", "1")
    assert code == 2
    assert doc["results"]["rows"][0]["error"]


def test_independence_verdicts(capsys):
    code, doc = run_json(capsys, "independence")
    assert code == 0 and doc["results"]["full_rank"] is True
    code, doc = run_json(capsys, "independence", "--params", "0.3,0.5,0.7,1,0.45,0.6,0.75")
    assert code == 1 and doc["results"]["full_rank"] is False
    assert doc["results"]["notes"]


def test_opcheck(capsys):
    code, doc = run_json(capsys, "opcheck", "--form", "thm-3.7", "--order", "3")
    assert code == 0 and doc["results"]["match"] is True
    code, doc = run_json(capsys, "opcheck", "--form", "lemma1-3.4", "--order", "0")
    assert code == 0 and doc["results"]["checked"] == 1
    code, doc = run_json(capsys, "opcheck", "--form", "lemma1-3.4", "--lemma-params", "1/3,1/5,-2")
    assert code == 2
    code, doc = run_json(capsys, "opcheck", "--form", "thm-3.7", "--printed-target")
    assert code == 1 and doc["results"]["first_mismatch"] == [0, 0, 1, 0]
    assert doc["results"]["max_deviation"].count("/") == 1


def test_identity(capsys):
    code, doc = run_json(capsys, "identity", "--id", "3.10", "--n", "0")
    assert code == 0
    assert all(r["abs_diff"] == 0 for r in doc["results"]["rows"])
    code, doc = run_json(capsys, "identity", "--id", "3.10", "--n", "2")
    assert code == 0 and len(doc["results"]["rows"]) == 3
    assert doc["results"]["matching_variants"] == ["x^n, b-coupled z-slot"]
    code, doc = run_json(capsys, "identity", "--id", "3.12", "--point", "0.05,0.04,0,0.02")
    assert code == 0
    assert all(r["status"] == "match" for r in doc["results"]["rows"])
    assert run(capsys, "identity", "--id", "3.10", "--point", "0,0.1,0.1,0.1")[0] == 2


def test_identity_inconclusive_exit_code(capsys, monkeypatch):
    def stalled(*args, **kwargs):
        raise InconclusiveError("no variant converged", [])

    monkeypatch.setattr(cli, "verify_3_12", stalled)
    code, doc = run_json(capsys, "identity", "--id", "3.12")
    assert code == 3 and doc["status"] == "inconclusive"


def test_output_file_and_table(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, table = run(capsys, "eval", "--point", "0.1,0,0,0", "--format", "table",
                      "--output", str(target))
    assert code == 0 and table.startswith("eval: pass")
    doc = json.loads(target.read_text())
    assert doc["results"]["axis_reduction"]["axis"] == "x"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "k2hyper", "eval", "--point", "0,0,0,0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["value"] == 1.0
