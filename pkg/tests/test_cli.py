from __future__ import annotations

import io
import json
import math
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

from narrow_escape import harness
from narrow_escape.cli import main
from narrow_escape.config import ConfigError, ExperimentConfig, parse_values
from narrow_escape.harness import CSV_COLUMNS, HarnessError, build_rows, judge, loglog_slope, read_csv, to_csv
from narrow_escape.mc import SimParams


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        rc = main(list(argv))
    return rc, out.getvalue(), err.getvalue()


# -- predict ----------------------------------------------------------------------------


@pytest.mark.parametrize("case, sets, want", [
    ("planar_funnel_symmetric", ["eps=0.01"], math.pi * math.pi / (2 * math.sqrt(0.01))),
    ("net_2d_window", ["area=3.14159", "boundary_len=6.28318", "window_len=0.0628318"], None),
    ("funnel_3d", ["volume=1", "a=0.01"], None),
])
def test_predict_rows(case, sets, want):
    args = ["predict", "--case", case]
    for s in sets:
        args += ["--set", s]
    rc, out, _ = run(*args)
    assert rc == 0
    rows = read_csv(out)
    assert len(rows) == 1 and rows[0]["case"] == case
    assert rows[0]["tau_mc"] == ""
    tau = float(rows[0]["tau_pred"])
    assert tau > 0
    if want is not None:
        assert tau == pytest.approx(want, rel=1e-12)


def test_predict_examples_through_cli():
    rc, out, _ = run("predict", "--case", "funnel_3d", "--set", "volume=1", "--set", "a=0.01")
    assert float(read_csv(out)[0]["tau_pred"]) == pytest.approx(707.1067811865476, rel=1e-9)
    rc, out, _ = run("predict", "--case", "sphere_cap", "--set", "delta=0.5", "--set", "theta=0.5")
    assert rc == 0 and float(read_csv(out)[0]["tau_pred"]) == 0.0
    rc, out, _ = run("predict", "--case", "dumbbell", "--set", "omega1_vol=1", "--set", "omega3_vol=1",
                     "--set", "Rc1=1", "--set", "Rc3=1", "--set", "a=0.01", "--set", "L=1")
    assert rc == 0 and float(read_csv(out)[0]["tau_pred"]) > 0


def test_param_json_roundtrip():
    rc, out, _ = run("predict", "--case", "planar_funnel_symmetric", "--set", "eps=0.02", "--set", "Rc=2")
    p = json.loads(read_csv(out)[0]["param_json"])
    assert p["eps"] == 0.02 and p["Rc"] == 2.0 and p["D"] == 1.0


def test_csv_columns_exact():
    rc, out, _ = run("predict", "--case", "disk_calibration")
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
    with pytest.raises(HarnessError):
        read_csv("a,b\n1,2\n")


def test_sweep_rows_sorted():
    rc, out, _ = run("sweep", "--predict-only", "--case", "planar_funnel_symmetric",
                     "--sweep-param", "eps", "--sweep-values", "0.04, 0.01,0.02")
    assert rc == 0
    rows = read_csv(out)
    eps = [float(r["epsilon_like"]) for r in rows]
    assert eps == [0.01, 0.02, 0.04]
    tau = [float(r["tau_pred"]) for r in rows]
    assert tau[0] / tau[2] == pytest.approx(2.0, rel=1e-12)


def test_output_file(tmp_path):
    path = tmp_path / "out.csv"
    rc, out, _ = run("predict", "--case", "disk_calibration", "-o", str(path))
    assert rc == 0 and out == ""
    assert read_csv(path.read_text())[0]["tau_pred"] == "0.25"


# -- input errors ---------------------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["predict"],
    ["predict", "--case", "nope"],
    ["predict", "--case", "planar_funnel_symmetric"],
    ["predict", "--case", "disk_calibration", "--set", "R"],
    ["predict", "--case", "disk_calibration", "--set", "R=abc"],
    ["sweep", "--case", "planar_funnel_symmetric", "--sweep-param", "eps", "--sweep-values", ""],
    ["sweep", "--case", "planar_funnel_symmetric", "--sweep-param", "eps", "--sweep-values", "0.1,-1"],
    ["sweep", "--case", "planar_funnel_symmetric"],
    ["simulate", "--case", "disk_calibration", "--dt", "0"],
    ["predict", "--case", "net_2d_window", "--set", "area=1", "--set", "boundary_len=1", "--set", "window_len=2"],
])
def test_bad_input_exit_code(argv):
    rc, out, err = run(*argv)
    assert rc == 2
    assert err.startswith("error:")


def test_regime_warning_goes_to_stderr():
    rc, out, err = run("predict", "--case", "planar_funnel_symmetric", "--set", "eps=0.9")
    assert rc == 0
    assert "warning" in err


# -- simulate / compare ---------------------------------------------------------------------


def test_compare_disk_passes():
    rc, out, err = run("compare", "--case", "disk_calibration", "--dt", "1e-4", "--n-paths", "2000", "--seed", "3")
    assert rc == 0
    row = read_csv(out)[0]
    assert int(row["n_paths"]) == 2000 and int(row["n_censored"]) == 0
    assert "ratio=" in err and "ok" in err


def test_compare_gate_fails():
    # a coarse step and a zero ratio tolerance with a tight z bound
    rc, out, err = run("compare", "--case", "disk_calibration", "--dt", "2e-2", "--n-paths", "4000",
                       "--z-bound", "0.01", "--ratio-tol", "0")
    assert rc == 1
    assert "FAIL" in err


def test_simulate_seed_reproducible():
    argv = ("simulate", "--case", "ball_calibration", "--dt", "1e-3", "--n-paths", "200", "--seed", "11")
    a = read_csv(run(*argv)[1])[0]
    b = read_csv(run(*argv, "--workers", "2")[1])[0]
    c = read_csv(run(*argv[:-1], "12")[1])[0]
    assert a["tau_mc"] == b["tau_mc"] and a["stderr"] == b["stderr"]
    assert a["tau_mc"] != c["tau_mc"] and a["tau_pred"] == c["tau_pred"]
    se = math.hypot(float(a["stderr"]), float(c["stderr"]))
    assert abs(float(a["tau_mc"]) - float(c["tau_mc"])) < 3 * se
    assert a["seed"] == "11" and float(a["dt"]) == 1e-3


def test_sweep_simulated_slope_reported():
    rc, out, err = run("sweep", "--case", "disk_calibration", "--sweep-param", "R", "--sweep-values", "0.5,1",
                       "--dt", "1e-4", "--n-paths", "500")
    assert rc == 0
    assert len(read_csv(out)) == 2


# -- config -----------------------------------------------------------------------------------


def test_config_roundtrip(tmp_path):
    cfg = ExperimentConfig(case="planar_funnel_symmetric", geometry={"Rc": np.float64(2.0)},
                           sim=SimParams(dt=np.float64(5e-4), n_paths=300, seed=4, refine_factor=8),
                           sweep_param="eps", sweep_values=(0.05, 0.025), output="x.csv", z_bound=2.5)
    text = cfg.to_ini()
    assert "np." not in text
    assert ExperimentConfig.from_ini(text) == cfg
    path = tmp_path / "exp.ini"
    cfg.write(path)
    assert ExperimentConfig.read(path) == cfg


def test_config_drives_cli(tmp_path):
    cfg = ExperimentConfig(case="planar_funnel_symmetric", sweep_param="eps", sweep_values=(0.02, 0.01))
    path = tmp_path / "exp.ini"
    cfg.write(path)
    rc, out, _ = run("sweep", "--predict-only", "--config", str(path))
    assert rc == 0 and len(read_csv(out)) == 2
    rc, _, err = run("predict", "--config", str(path), "--case", "disk_calibration")
    assert rc == 2


def test_config_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig(case="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(case="disk_calibration", sweep_param="R", sweep_values=())
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[experiment]\nversion = 99\ncase = disk_calibration\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("not an ini")
    with pytest.raises(ConfigError):
        parse_values("1, x", "values")


# -- harness helpers --------------------------------------------------------------------------


def test_judge_and_slope():
    row = {"tau_pred": 10.0, "tau_mc": 11.0, "stderr": 0.5}
    v = judge(row, z_bound=3, ratio_tol=0.05)
    assert v.ratio == pytest.approx(1.1) and v.zscore == pytest.approx(2.0) and v.ok
    assert not judge(row, z_bound=1, ratio_tol=0.05).ok
    rows = [{"epsilon_like": e, "tau_mc": 3 / math.sqrt(e)} for e in (0.01, 0.04, 0.16)]
    assert loglog_slope(rows) == pytest.approx(-0.5)
    with pytest.raises(HarnessError):
        loglog_slope(rows[:1])


def test_build_rows_predict_only_has_blank_mc():
    rows = build_rows("planar_funnel_symmetric", {"eps": 0.01}, simulate=False)
    assert rows[0]["tau_mc"] is None
    text = to_csv(rows)
    assert read_csv(text)[0]["n_paths"] == ""


def test_every_case_predicts_with_some_geometry():
    sample = {
        "composite": dict(head_tau=1, head_volume=1, neck_radius=0.01, neck_len=1),
        "cone": dict(S=1, a=0.01, C=0.5, cone_len=1),
        "dumbbell": dict(omega1_vol=1, omega3_vol=1, Rc1=1, Rc3=1, a=0.01, L=1),
        "funnel_3d_multi_neck": dict(volume=1, a1=0.01, ell1=1, a2=0.02, ell2=1),
        "net_2d_window": dict(area=1, boundary_len=4, window_len=0.01),
        "net_3d_window": dict(volume=1, a=0.01),
        "planar_funnel_nu": dict(eps=0.01, nu=1),
        "planar_multi_neck": dict(eps1=0.01, ell1=1, eps2=0.02, ell2=1),
        "surface_funnel": dict(S=1, a=0.01, nu=1),
        "surface_with_cylinder": dict(S=1, a=0.01, cyl_len=1),
        "planar_funnel_general": dict(eps=0.01, Rc=1, rc=2),
        "planar_funnel_symmetric": dict(eps=0.01),
        "funnel_3d": dict(a=0.01),
        "surface_funnel_nu1": dict(a=0.01),
        "sphere_cap": dict(delta=0.1),
        "needle_turnaround": dict(l=0.99),
    }
    for name in harness.CASES:
        rows = build_rows(name, sample.get(name, {}), simulate=False)
        assert rows[0]["tau_pred"] > 0, name


def test_cases_and_bleq(tmp_path):
    rc, out, _ = run("cases")
    assert rc == 0 and "needle_turnaround" in out
    path = tmp_path / "y.txt"
    rc, out, _ = run("bleq", "--y0", "-4.7", "--dy0", "-1", "-o", str(path))
    assert rc == 0
    assert "asymptote" in out and "wronskian" in out
    assert np.loadtxt(path).shape[1] == 2
    rc, out, _ = run("bleq", "--y0", "0", "--dy0", "2")
    assert "slope" in out


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "narrow_escape.cli", "predict", "--case", "disk_calibration"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("case,")
