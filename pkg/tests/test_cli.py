import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qmeas import family
from qmeas.cli import main
from qmeas.serialize import dump_measurement

GOLDEN = Path(__file__).parent / "golden"


def run_cli(args, capsys):
    try:
        code = main(list(args))
    except SystemExit as exc:  # argparse's own exits
        code = exc.code if isinstance(exc.code, int) else 2
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


# ------------------------------------------------------------------- sweep


def test_sweep_endpoints(capsys):
    code, out, _ = run_cli(["sweep", "--family", "0", "--grid", "0:1:101"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert len(rows) == 101
    first, last = rows[0], rows[-1]
    assert abs(float(first["G"]) - 1 / 3) < 1e-11
    assert abs(float(first["F"]) - 1.0) < 1e-11
    assert abs(float(first["R"]) - 1.0) < 1e-11
    assert abs(float(last["G"]) - 0.5) < 1e-11
    assert abs(float(last["F"]) - 0.5) < 1e-11
    assert abs(float(last["R"]) - 0.0) < 1e-11


def test_sweep_saturation_column(capsys):
    code, out, _ = run_cli(["sweep", "--family", "4"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0]["sat_global"] == "1"  # unitary point
    assert all(r["sat_global"] == "0" for r in rows[1:])


def test_sweep_domain_violation_exits_2(capsys):
    code, _, err = run_cli(["sweep", "--family", "2", "--grid", "0:1:11"], capsys)
    assert code == 2
    assert "domain" in err.lower() or "grid" in err.lower()


def test_sweep_bad_family_exits_2(capsys):
    code, _, _ = run_cli(["sweep", "--family", "7"], capsys)
    assert code == 2


def test_sweep_bad_grid_syntax_exits_2(capsys):
    code, _, _ = run_cli(["sweep", "--family", "0", "--grid", "0..1"], capsys)
    assert code == 2


def test_sweep_json_format(capsys):
    code, out, _ = run_cli(["sweep", "--family", "1", "--grid", "0:1:3",
                            "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 3
    assert rows[0]["t"] == 1 and rows[0]["p"] == 0.0
    assert "gap_global" in rows[0] and "sat_FR" in rows[0]


def test_sweep_golden_files(capsys):
    for t in range(5):
        code, out, _ = run_cli(["sweep", "--family", str(t)], capsys)
        assert code == 0
        assert out == (GOLDEN / f"sweep_t{t}.csv").read_text()


# ------------------------------------------------------------------ verify


def test_verify_identity(tmp_path, capsys):
    path = tmp_path / "id.json"
    dump_measurement(family(4, 0.0), path)
    code, out, _ = run_cli(["verify", "--in", str(path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert list(rep) == ["dim", "G", "F", "R", "gap_global", "gap_GF",
                         "gap_GR", "gap_FR", "sat_global", "sat_GF",
                         "sat_GR", "sat_FR"]
    assert rep["sat_global"] == 1
    assert abs(rep["G"] - 1 / 3) < 1e-12


def test_verify_strict_gap_measurement(tmp_path, capsys):
    path = tmp_path / "m4.json"
    dump_measurement(family(4, 0.5), path)
    code, out, _ = run_cli(["verify", "--in", str(path)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["sat_global"] == 0
    assert rep["gap_global"] > 1e-3


def test_verify_incomplete_set_exits_3(tmp_path, capsys):
    path = tmp_path / "bad.json"
    s = math.sqrt(1.01)
    entry = [[[s, 0.0], [0.0, 0.0], [0.0, 0.0]],
             [[0.0, 0.0], [s, 0.0], [0.0, 0.0]],
             [[0.0, 0.0], [0.0, 0.0], [s, 0.0]]]
    path.write_text(json.dumps({"dim": 3, "kraus": [entry]}))
    code, _, err = run_cli(["verify", "--in", str(path)], capsys)
    assert code == 3
    assert "completeness" in err.lower()


def test_verify_malformed_json_exits_2(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    code, _, _ = run_cli(["verify", "--in", str(path)], capsys)
    assert code == 2


def test_verify_missing_file_exits_2(capsys):
    code, _, _ = run_cli(["verify", "--in", "/nonexistent/m.json"], capsys)
    assert code == 2


# ---------------------------------------------------------------- simulate


def test_simulate_exact_unitary_point(capsys):
    code, out, _ = run_cli(["simulate", "--family", "4", "--p", "0", "--e", "1",
                            "--exact", "--format", "json"], capsys)
    assert code == 0
    res = json.loads(out)
    assert abs(res["G"] - 1 / 3) < 1e-12
    assert abs(res["F"] - 1.0) < 1e-12
    assert abs(res["R"] - 1.0) < 1e-12
    assert res["sigma_G"] == 0 and res["sigma_F"] == 0 and res["sigma_R"] == 0
    assert res["shots"] == 0 and res["runs"] == 0
    assert "e_fitted" not in res


def test_simulate_exact_projective_limit(capsys):
    code, out, _ = run_cli(["simulate", "--family", "4", "--p", "1", "--e", "1",
                            "--exact", "--format", "json"], capsys)
    assert code == 0
    res = json.loads(out)
    assert abs(res["G"] - 5 / 12) < 1e-12
    assert abs(res["F"] - 2 / 3) < 1e-12
    assert abs(res["R"]) < 1e-12


def test_simulate_deterministic_bytes(tmp_path, capsys):
    args = ["simulate", "--family", "0", "--p", "0.5", "--e", "0.95",
            "--shots", "2000", "--runs", "3", "--seed", "11"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, _, _ = run_cli(args + ["--format", "json", "--out", str(a)], capsys)
    assert code == 0
    code, _, _ = run_cli(args + ["--format", "json", "--out", str(b)], capsys)
    assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["e_injected"] == 0.95


def test_simulate_seed_env_and_flag(tmp_path, capsys, monkeypatch):
    args = ["simulate", "--family", "0", "--p", "0.4", "--shots", "1000",
            "--runs", "2", "--format", "json"]
    code, flagged, _ = run_cli(args + ["--seed", "9"], capsys)
    assert code == 0
    monkeypatch.setenv("QMEAS_SEED", "9")
    code, via_env, _ = run_cli(args, capsys)
    assert code == 0
    assert flagged == via_env
    # explicit flag beats the environment
    code, overridden, _ = run_cli(args + ["--seed", "10"], capsys)
    assert code == 0
    assert overridden != via_env
    monkeypatch.setenv("QMEAS_SEED", "not-a-number")
    code, _, _ = run_cli(args, capsys)
    assert code == 2


def test_simulate_grid_with_fit(capsys):
    code, out, _ = run_cli(["simulate", "--family", "0", "--grid", "0:1:5",
                            "--e", "0.9", "--shots", "5000", "--runs", "3",
                            "--seed", "4", "--fit-e", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 5
    fitted = {r["e_fitted"] for r in rows}
    assert len(fitted) == 1
    assert abs(fitted.pop() - 0.9) < 0.05


def test_simulate_fit_requires_grid(capsys):
    code, _, _ = run_cli(["simulate", "--family", "0", "--p", "0.5",
                          "--fit-e", "--format", "json"], capsys)
    assert code == 2


def test_simulate_grid_csv_has_sigma_columns(capsys):
    code, out, _ = run_cli(["simulate", "--family", "4", "--grid", "0:1:3",
                            "--e", "1", "--shots", "1000", "--runs", "2",
                            "--seed", "1"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header[-3:] == ["sigma_G", "sigma_F", "sigma_R"]
    assert len(rows) == 3


def test_simulate_domain_check_before_running(capsys):
    code, _, _ = run_cli(["simulate", "--family", "2", "--p", "0.9"], capsys)
    assert code == 2


def test_simulate_bad_e_exits_2(capsys):
    code, _, _ = run_cli(["simulate", "--family", "0", "--p", "0.5",
                          "--e", "1.5", "--exact"], capsys)
    assert code == 2


# ----------------------------------------------------------------- compile


def test_compile_family_flag(capsys):
    code, out, _ = run_cli(["compile", "--family", "4", "--p", "0.36"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["outcome", "theta0_deg", "theta1_deg", "theta2_deg",
                      "rev_theta0_deg", "rev_theta1_deg", "rev_theta2_deg"]
    assert rows[0]["theta1_deg"] == "18.434949"


def test_compile_von_neumann_file(tmp_path, capsys):
    path = tmp_path / "vn.json"
    dump_measurement(family(0, 1.0), path)
    code, out, _ = run_cli(["compile", "--in", str(path)], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert [rows[0][k] for k in ("theta0_deg", "theta1_deg", "theta2_deg")] == \
        ["0.000000", "45.000000", "45.000000"]


def test_compile_non_diagonal_exits_5(tmp_path, capsys):
    rng = np.random.default_rng(1)
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q, _ = np.linalg.qr(z)
    path = tmp_path / "u.json"
    from qmeas import Measurement

    dump_measurement(Measurement(q[None]), path)
    code, _, err = run_cli(["compile", "--in", str(path)], capsys)
    assert code == 5
    assert "0" in err  # names the offending operator


def test_compile_needs_p_with_family(capsys):
    code, _, _ = run_cli(["compile", "--family", "4"], capsys)
    assert code == 2


# ----------------------------------------------------------- console script


def test_console_script_installed():
    proc = subprocess.run(["qmeas", "sweep", "--family", "0", "--grid", "0:1:2"],
                          capture_output=True, text=True,
                          env=dict(os.environ, PYTHONHASHSEED="0"))
    assert proc.returncode == 0
    assert proc.stdout.startswith("t,p,G,F,R")


def test_module_invocation():
    proc = subprocess.run([sys.executable, "-m", "qmeas.cli", "verify", "--in", "/missing"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
