"""Command-line interface: JSON outputs and error exits."""

import json
import subprocess
import sys

import pytest

from hermcong.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_modform_qexp(capsys):
    code, out, _ = run(capsys, "modform", "qexp", "--weight", "12", "--terms", "5")
    assert code == 0
    assert json.loads(out)["coeffs"][:3] == ["0/1", "1/1", "-24/1"]


def test_quad_bernoulli(capsys):
    assert json.loads(run(capsys, "quad", "bernoulli", "--m", "5")[1])["B"] == "-10/3"
    assert json.loads(run(capsys, "--disc", "0", "quad", "bernoulli", "--m", "6")[1])["B"] == "1/42"


def test_siegel_fp(capsys, tmp_path):
    m = write(tmp_path, "i3.json", [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    code, out, _ = run(capsys, "siegel", "fp", "--p", "3", "--matrix", m)
    res = json.loads(out)
    assert code == 0 and res["coeffs"] == ["1/1", "27/1"] and res["provenance"] == "forced"


def test_siegel_fp_missing_datum_exit_2(capsys, tmp_path):
    m = write(tmp_path, "m4.json", [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 8]])
    code, out, err = run(capsys, "siegel", "fp", "--p", "2", "--matrix", m, "--max-states", "1000")
    assert code == 2 and out == ""
    e = json.loads(err)
    assert e["error"] == "MissingLocalDatum"
    assert e["missing"][0]["n"] == 4 and e["missing"][0]["d"] == 3


def test_pullback_scalar(capsys, tmp_path):
    one = write(tmp_path, "one.json", [[1]])
    code, out, _ = run(capsys, "pullback", "--mu", "8", "--n1", "1", "--n2", "1", "--S1", one, "--S2", one)
    res = json.loads(out)
    assert code == 0 and res["mu"] == 8 and res["completions"] > 1
    assert list(res["coefficients"]) != []


def test_hecke_reps(capsys):
    res = json.loads(run(capsys, "hecke", "reps", "--n", "2", "--s", "1", "--p", "2")[1])
    assert res["count"] == 5 and len(res["reps"]) == 5
    res = json.loads(run(capsys, "hecke", "reps", "--n", "2", "--s", "0", "--t", "1", "--p", "2")[1])
    assert res["count"] == 20


def test_hecke_eigencheck_oracle_only(capsys):
    res = json.loads(run(capsys, "hecke", "eigencheck", "--oracle-only")[1])
    assert res["constant"] is True and res["ratios"][0] == "1051137/1"


def test_congruence_bad_config_exit_2(capsys, tmp_path):
    cfg = write(tmp_path, "cfg.json", {"disc": 3, "mu": 8, "bogus": 1})
    code, out, err = run(capsys, "congruence", "check", "--config", cfg)
    assert code == 2
    assert json.loads(err)["error"] == "CongruenceError"


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "--output", str(target), "quad", "bernoulli", "--m", "5")
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["B"] == "-10/3"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hermcong.cli", "quad", "bernoulli", "--m", "5"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["B"] == "-10/3"


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["hecke", "reps", "--n", "2"])
    assert exc.value.code != 0
