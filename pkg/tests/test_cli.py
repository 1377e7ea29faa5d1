import json
import subprocess
import sys
from pathlib import Path

import pytest

from flagclean.cli import main

PLANE = str(Path(__file__).resolve().parents[1] / "demos" / "plane.yaml")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_derive_prints_four_forms(capsys):
    code, out, _ = run(capsys, "derive", "--builtin")
    assert code == 0
    assert out.splitlines() == ["mu_-1", "mu_0", "mu_-1 + 2*mu_0 + Lambda + 3*kappa", "mu_0 + Lambda + kappa"]


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", "--set", "mu_-1=1/2", "mu_0=1/3", "Lambda=0", "kappa=0")
    assert code == 0 and out.startswith("CLEAN")
    code, out, _ = run(capsys, "check", "--set", "mu_-1=1/2", "mu_0=1/2", "Lambda=1/2", "kappa=0")
    assert code == 3 and out.startswith("NOT CLEAN")
    code, _, err = run(capsys, "check", "--set", "mu_-1=1/2")
    assert code == 2 and "kappa" in err
    code, _, err = run(capsys, "check", "--set", "mu_-1=0.5", "mu_0=1", "Lambda=1", "kappa=1")
    assert code == 1


def test_transitions_and_linebundle(capsys):
    code, out, _ = run(capsys, "transitions")
    assert code == 0
    assert "Psi_12: (x, y, a, v) -> (1/x, y/x^2, a/x, v/x^3)" in out
    code, out, _ = run(capsys, "linebundle")
    assert code == 0 and out.rstrip().endswith("consistent")


def test_oracle_commands(capsys):
    code, out, _ = run(capsys, "oracle", "simple", "--mu", "1/2,1/3", "--window", "4")
    assert code == 0 and "simple: true" in out
    code, _, err = run(capsys, "oracle", "simple", "--mu", "25/2", "--window", "4")
    assert code == 2 and "window" in err
    code, out, _ = run(capsys, "oracle", "clean", "--set", "mu_-1=1/2", "mu_0=1/3", "Lambda=1/5", "kappa=1/7")
    assert code == 0 and "agree" in out


def test_oracle_grid_small(capsys):
    code, out, _ = run(capsys, "oracle", "grid", "--denominator-bound", "2", "--range", "1", "--samples", "200")
    assert code == 0
    assert "agreement 100%" in out


def test_verify_and_model_file(capsys):
    assert run(capsys, "verify")[0] == 0
    code, out, _ = run(capsys, "derive", "--model", PLANE)
    assert code == 0 and out.splitlines() == ["m1", "m2", "m1 + m2"]
    code, _, err = run(capsys, "derive", "--model", "/nonexistent.yaml")
    assert code == 1


def test_bad_model_file_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(Path(PLANE).read_text().replace("[[-1, 0], [-1, 1]]", "[[-2, 0], [-1, 1]]"))
    code, _, err = run(capsys, "verify", "--model", str(p))
    assert code == 1
    assert "bad.yaml" in err and "unimodular" in err


def test_json_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run(capsys, "derive", "--json")
        outs.append(out)
    assert outs[0] == outs[1]
    data = json.loads(outs[0])
    assert [f["form"] for f in data["forms"]][2] == "mu_-1 + 2*mu_0 + Lambda + 3*kappa"
    code, out, _ = run(capsys, "verify", "--json")
    assert json.loads(out)["ok"] is True


def test_export_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "export")
    p = tmp_path / "sl2.yaml"
    p.write_text(out)
    code, out2, _ = run(capsys, "derive", "--model", str(p))
    assert code == 0 and len(out2.splitlines()) == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "flagclean", "derive"], capture_output=True, text=True)
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 4


@pytest.mark.parametrize("argv", [["derive", "--model", PLANE, "--builtin"], ["oracle"], []])
def test_usage_errors_exit_nonzero(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code != 0
