import csv
import json
import os
import subprocess
import sys

import yaml

from translab.cli import EXIT_CHECKS_FAILED, EXIT_CONFIG, EXIT_PRECONDITION, main


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def read_all(directory):
    return {name: open(os.path.join(directory, name), "rb").read() for name in sorted(os.listdir(directory))}


def test_solve_writes_report_and_csv(tmp_path):
    cfg = write(tmp_path, "s.yaml", {"command": "solve", "grid": 9})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["provenance"]["version"]
    assert report["metrics"]["u_max"] <= 0
    assert report["metrics"]["distributional_residual"] < 1e-10
    assert "time" not in json.dumps(report).lower()
    rows = list(csv.DictReader(open(out / "solution.csv")))
    assert rows and set(rows[0]) == {"x1", "x2", "u", "error"}


def test_flat_command(tmp_path):
    cfg = write(tmp_path, "f.yaml", {"command": "flat", "options": {"radius": 0.6, "height": 0.1,
                                                                    "points_per_line": 5}})
    out = tmp_path / "out"
    assert main(["flat", "--config", cfg, "--out", str(out)]) == 0
    m = json.loads((out / "report.json").read_text())["metrics"]
    assert m["reflection_asymmetry"] < 1e-8
    assert all(abs(j - 1) < 1e-3 for j in m["normal_jumps"].values())


def test_regularity_command_prints_exponent(tmp_path, capsys):
    cfg = write(tmp_path, "r.yaml", {"command": "regularity-fit", "options": {"depth": 5, "samples": 40}})
    assert main(["regularity-fit", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert "alpha_hat=" in out and "band=" in out


def test_config_error_exit_code(tmp_path):
    cfg = write(tmp_path, "bad.yaml", {"command": "solve", "dim": 7})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_CONFIG
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "config" and "dim" in err["message"]


def test_precondition_exit_code(tmp_path):
    cfg = write(tmp_path, "p.yaml", {"command": "regularity-fit",
                                     "interface": {"family": "linear", "slope": 0.1}})
    out = tmp_path / "out"
    assert main(["regularity-fit", "--config", cfg, "--out", str(out)]) == EXIT_PRECONDITION
    assert json.loads((out / "error.json").read_text())["error"] == "precondition"


def test_failed_checks_exit_code(tmp_path):
    cfg = write(tmp_path, "v.yaml", {"command": "verify", "options": {
        "mean_value_points": 5, "laplacian_points": 1, "eps_ladder": [0.1, 0.05],
        "laplacian_tolerance": 1e-12}})
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == EXIT_CHECKS_FAILED
    rows = list(csv.DictReader(open(out / "verify.csv")))
    failed = [r["check"] for r in rows if r["passed"] == "false"]
    assert failed == ["laplacian_match"]


def test_seed_override_and_env_out(tmp_path, monkeypatch):
    cfg = write(tmp_path, "s.yaml", {"command": "solve", "grid": 5})
    monkeypatch.setenv("TRANSLAB_OUT", str(tmp_path / "env"))
    assert main(["solve", "--config", cfg, "--seed", "9"]) == 0
    assert json.loads((tmp_path / "env" / "report.json").read_text())["config"]["seed"] == 9
    assert main(["solve", "--config", cfg, "--threads", "0"]) == EXIT_CONFIG


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "s.yaml", {"command": "solve", "grid": 5})
    res = subprocess.run([sys.executable, "-m", "translab", "solve", "--config", cfg, "--out",
                          str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr


def test_outputs_identical_across_thread_counts(tmp_path):
    cfg = write(tmp_path, "st.yaml", {"command": "stability-sweep", "options": {"sweep": [0.2, 0.1]}})
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["stability-sweep", "--config", cfg, "--out", str(a), "--threads", "1"]) == 0
    assert main(["stability-sweep", "--config", cfg, "--out", str(b), "--threads", "2"]) == 0
    assert read_all(a) == read_all(b)
