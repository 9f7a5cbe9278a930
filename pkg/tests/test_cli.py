import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest


def run_cli(*args, timeout=240):
    cmd = [sys.executable, "-m", "minheat.cli", *args]
    return subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)


def test_table1_pretty_and_values():
    cp = run_cli("table1")
    assert cp.returncode == 0
    assert "penalty_percent" in cp.stdout
    assert "csl" in cp.stdout and "dp" in cp.stdout


def test_table1_csv_deterministic():
    a = run_cli("--format", "csv", "table1")
    b = run_cli("--format", "csv", "table1")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    rows = a.stdout.strip().splitlines()
    header = rows[0].split(",")
    data = {r.split(",")[0]: dict(zip(header, r.split(","))) for r in rows[1:]}
    assert float(data["grw"]["penalty_percent"]) == pytest.approx(0.0, abs=1e-9)
    assert float(data["csl"]["penalty_percent"]) == pytest.approx(47.0, abs=1.0)
    assert float(data["dp"]["penalty_percent"]) == pytest.approx(22.0, abs=1.0)


def test_table1_json_to_file(tmp_path):
    out = tmp_path / "report.json"
    cp = run_cli("--format", "json", "--out", str(out), "table1")
    assert cp.returncode == 0
    rows = json.loads(out.read_text())
    by_model = {r["model"]: r for r in rows}
    assert by_model["grw"]["gaussian_value"] == pytest.approx(0.375, rel=1e-9)
    assert by_model["dp"]["optimal_support_radius"] == pytest.approx(
        np.sqrt(7.0), rel=1e-9)


def test_heat_divergent_flag():
    cp = run_cli("--format", "json", "heat", "--kind", "grw",
                 "--profile", "dp-optimal")
    assert cp.returncode == 0
    payload = json.loads(cp.stdout)
    assert payload["divergent"] is True
    assert payload["geometric_value"] is None


def test_heat_physical_rate_prefactor():
    cp = run_cli("--gamma-csl", "2.0", "--total-mass", "3.0", "--format", "json",
                 "heat", "--kind", "csl", "--profile", "gaussian")
    payload = json.loads(cp.stdout)
    assert payload["physical_rate"] == pytest.approx(
        6.0 * payload["geometric_value"], rel=1e-12)


def test_optimize_writes_result_and_profile(tmp_path):
    prof_path = tmp_path / "opt-profile.txt"
    cp = run_cli("optimize", "--kind", "dp", "--n", "120",
                 "--profile-out", str(prof_path))
    assert cp.returncode == 0
    payload = json.loads(cp.stdout)
    assert payload["converged"] is True
    assert payload["value"] == pytest.approx(15.0 / (14.0 * 7.0**1.5), rel=5e-3)
    support = max(r for r, v in zip(payload["profile"]["r"],
                                    payload["profile"]["values"]) if v > 1e-8)
    assert support == pytest.approx(np.sqrt(7.0), abs=0.1)
    assert prof_path.read_text().startswith("# minheat-profile v1\n")


def test_optimize_nonconvergence_exit_code():
    # the variance target cannot be met inside r_max = 1.5
    cp = run_cli("optimize", "--kind", "csl", "--n", "80", "--r-max", "1.5",
                 "--max-iter", "3000")
    assert cp.returncode == 3
    assert "did not converge" in cp.stderr


def test_decohere_csv_values():
    cp = run_cli("--format", "csv", "decohere", "--model", "grw",
                 "--profile", "gaussian", "--d-max", "4", "--n-d", "5")
    assert cp.returncode == 0
    lines = cp.stdout.strip().splitlines()
    assert lines[0] == "d,gamma_over_rate_constant"
    first = [float(x) for x in lines[1].split(",")]
    assert first == [0.0, 0.0]
    d2 = [float(x) for x in lines[3].split(",")]
    assert d2[0] == pytest.approx(2.0)
    assert d2[1] == pytest.approx(1 - np.exp(-0.5), rel=1e-9)


def test_decohere_compact_saturation():
    cp = run_cli("--format", "csv", "decohere", "--model", "csl",
                 "--profile", "csl-optimal", "--d-min", "6", "--d-max", "7",
                 "--n-d", "2")
    rows = cp.stdout.strip().splitlines()[1:]
    for row in rows:
        assert float(row.split(",")[1]) == pytest.approx(1.0, abs=1e-10)


def test_decohere_closed_form_columns():
    cp = run_cli("--format", "csv", "decohere", "--model", "csl",
                 "--profile", "csl-optimal", "--d-max", "3", "--n-d", "3",
                 "--closed-form")
    lines = cp.stdout.strip().splitlines()
    assert lines[0] == "d,gamma_over_rate_constant,F_grw,F_csl"
    d, rate, f_grw, f_csl = (float(x) for x in lines[2].split(","))
    assert rate == pytest.approx(1.0 - f_csl, abs=1e-8)


def test_decohere_bad_range_usage_error():
    cp = run_cli("decohere", "--model", "csl", "--profile", "gaussian",
                 "--d-max", "-2")
    assert cp.returncode == 2


def test_decohere_unknown_profile_usage_error():
    cp = run_cli("decohere", "--model", "csl", "--profile", "nope.txt",
                 "--d-max", "2")
    assert cp.returncode == 2
    assert "unknown profile" in cp.stderr


def test_hybrid_equal_smearings():
    cp = run_cli("--format", "json", "hybrid", "--g-c", "gaussian",
                 "--g-g", "gaussian", "--n-k", "48", "--d-max", "4", "--n-d", "3")
    assert cp.returncode == 0
    payload = json.loads(cp.stdout)
    k = np.asarray(payload["correlators"]["k"])
    gamma_c = np.asarray(payload["correlators"]["gamma_c"])
    assert np.allclose(gamma_c, 2 * np.pi / k**2, rtol=1e-9)
    heating = payload["heating"]
    assert heating["measurement"] == pytest.approx(heating["feedback"], rel=1e-10)
    assert heating["total"] == pytest.approx(2 * heating["measurement"], rel=1e-12)
    assert payload["curve"]["gamma_over_rate_constant"][0] == 0.0


def test_hybrid_compact_support_exit_code():
    cp = run_cli("hybrid", "--g-c", "csl-optimal", "--g-g", "csl-optimal")
    assert cp.returncode == 4
    assert "transform vanishes" in cp.stderr


def test_rearrange_roundtrip(tmp_path):
    src = tmp_path / "shell.txt"
    r = np.linspace(0.0, 6.0, 400)
    vals = np.exp(-((r - 2.0) ** 2) / 0.2)
    lines = ["# minheat-profile v1"] + [f"{a:.17g} {b:.17g}" for a, b in zip(r, vals)]
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "sorted.txt"
    cp = run_cli("--out", str(out), "rearrange", "--profile", str(src))
    assert cp.returncode == 0
    body = out.read_text().splitlines()
    assert body[0] == "# minheat-profile v1"
    data = np.array([[float(x) for x in ln.split()] for ln in body
                     if ln and not ln.startswith("#")])
    assert np.all(np.diff(data[:, 1]) <= 1e-12)


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"format": "json", "gamma_csl": 4.0}))
    cp = run_cli("--config", str(cfg), "heat", "--kind", "csl",
                 "--profile", "gaussian")
    payload = json.loads(cp.stdout)
    assert payload["physical_rate"] == pytest.approx(
        4.0 * payload["geometric_value"], rel=1e-12)


def test_unknown_format_rejected():
    cp = run_cli("--format", "yaml", "table1")
    assert cp.returncode == 2
