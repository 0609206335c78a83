"""Exit criteria for the toolkit.

Each test prints a ``criterion N: PASS/FAIL`` line (collected again in the
terminal summary). The Monte Carlo sizes below are the desk-scale settings
the criteria call for, so this module takes roughly twenty minutes on one
core. Deselect it with ``-m "not acceptance"`` for a quick run.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from narrow_escape import asymptotics as asy
from narrow_escape.boundary_layer import solve_bleq, surface_mfpt_quadrature
from narrow_escape.geometry import (
    DumbbellSpec,
    FunnelDomain2D,
    Neck,
    PlanarFunnelSpec,
    profile_area,
    sphere_profile,
    tangent_circle_profile,
)
from narrow_escape.harness import build_rows
from narrow_escape.markov import network_eigen, simulate_telegraph, telegraph_eigen, two_state
from narrow_escape.mc import SimParams, simulate_exit_probs

pytestmark = [pytest.mark.acceptance]


def _mc(case, geometry, sim, sweep_param=None, sweep_values=()):
    return build_rows(case, geometry, True, sim, sweep_param, sweep_values)


# 1 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_01_calibration_oracles(report):
    sim = SimParams(dt=1e-5, n_paths=100_000, seed=101, max_time=50.0)
    disk = _mc("disk_calibration", {}, sim)[0]
    ball = _mc("ball_calibration", {}, sim.with_(seed=102))[0]
    rd, rb = disk["tau_mc"] / 0.25, ball["tau_mc"] / (1 / 6)
    ok = abs(rd - 1) <= 0.03 and abs(rb - 1) <= 0.03 and disk["n_censored"] == 0 and ball["n_censored"] == 0
    report(1, ok, f"disk {disk['tau_mc']:.5f} (ratio {rd:.4f}), ball {ball['tau_mc']:.5f} (ratio {rb:.4f}), "
                  f"1e5 paths each, dt 1e-5, {disk['wall_time_s'] + ball['wall_time_s']:.0f} s")
    assert ok


# 2 -------------------------------------------------------------------------------------------

BLEQ_IC = (-4.7, -1.0)


def test_criterion_02_bleq_wronskian_and_runtime(report):
    t0 = time.perf_counter()
    s = solve_bleq(*BLEQ_IC, xi_max=1e4)
    elapsed = time.perf_counter() - t0
    rel = abs(s.wronskian - 9.4) / 9.4
    ok = rel <= 1e-6 and s.wronskian_drift <= 1e-6 and elapsed < 1.0
    report(2, ok, f"Wronskian {s.wronskian:.12f} (rel err {rel:.1e}, drift {s.wronskian_drift:.1e}), "
                  f"solve {elapsed * 1e3:.0f} ms")
    assert ok


@pytest.mark.xfail(strict=True, reason="the stated ICs lead to an asymptote near -5.35, outside -5 +/- 0.2; "
                                       "an independent closed-form solution confirms the computed value")
def test_criterion_02_bleq_asymptote(report):
    s = solve_bleq(*BLEQ_IC, xi_max=1e4)
    ok = not s.growing and abs(s.asymptote + 5.0) <= 0.2
    report(2, ok, f"asymptote {s.asymptote:.6f} (target -5.0 +/- 0.2, slope {s.slope:.1e})")
    assert ok


# 3 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_03_planar_funnel_scaling(report):
    sim = SimParams(dt=1e-3, n_paths=50_000, seed=303, refine_factor=64)
    rows = _mc("planar_funnel_symmetric", {"Rc": 1.0, "area": math.pi}, sim, "eps", (0.05, 0.025, 0.0125))
    rows = sorted(rows, key=lambda r: -r["epsilon_like"])
    scaled = [r["tau_mc"] * math.sqrt(r["epsilon_like"]) for r in rows]
    ratios = [r["tau_mc"] / r["tau_pred"] for r in rows]
    spread = max(scaled) / min(scaled) - 1
    toward_one = all(abs(1 - b) < abs(1 - a) for a, b in zip(ratios, ratios[1:]))
    wall = sum(r["wall_time_s"] for r in rows)
    ok = spread <= 0.15 and toward_one and wall <= 1800
    report(3, ok, "mean*sqrt(eps) " + ", ".join(f"{v:.3f}" for v in scaled) + f" (spread {spread:.1%}); "
                  "mc/pred " + ", ".join(f"{v:.3f}" for v in ratios) + f"; {wall:.0f} s")
    assert ok


# 4 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_04_funnel_3d_scaling(report):
    sim = SimParams(dt=1e-4, n_paths=1000, seed=404, refine_factor=64)
    geo = {"ell": 1.0, "head_radius": 0.5}
    rows = _mc("funnel_3d", geo, sim, "a", (0.025, 0.1))
    small, big = sorted(rows, key=lambda r: r["epsilon_like"])
    ratio = small["tau_mc"] / big["tau_mc"]
    se = ratio * math.hypot(small["stderr"] / small["tau_mc"], big["stderr"] / big["tau_mc"])
    wall = small["wall_time_s"] + big["wall_time_s"]
    ok = abs(ratio / 8 - 1) <= 0.25 and wall <= 1800
    report(4, ok, f"mean(a)/mean(4a) = {ratio:.3f} +/- {se:.3f} (target 8 +/- 25%); "
                  f"mc/pred {small['tau_mc'] / small['tau_pred']:.3f}, {big['tau_mc'] / big['tau_pred']:.3f}; "
                  f"{wall:.0f} s")
    assert ok


# 5 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_05_sphere_cap(report):
    exact = asy.net_sphere_cap(1.0, math.pi, 0.1).tau
    row = _mc("sphere_cap", {"delta": 0.1}, SimParams(dt=1e-4, n_paths=4000, seed=505))[0]
    quad = surface_mfpt_quadrature(sphere_profile(1.0, 0.1))
    r_mc, r_q = row["tau_mc"] / exact, quad / exact
    ok = abs(r_mc - 1) <= 0.15 and abs(r_q - 1) <= 1e-3
    report(5, ok, f"closed form {exact:.6f}; 1D mc {row['tau_mc']:.4f} +/- {row['stderr']:.4f} "
                  f"(ratio {r_mc:.4f}); quadrature rel err {abs(r_q - 1):.1e}")
    assert ok


# 6 -------------------------------------------------------------------------------------------


def test_criterion_06_quadrature_convergence(report):
    t0 = time.perf_counter()
    ratios = []
    for a in (0.04, 0.02, 0.01):
        p = tangent_circle_profile(a, 1.0, 1.0)
        pred = asy.net_surface(profile_area(p, p.Lambda), a, 1.0, 1.0).tau
        ratios.append(surface_mfpt_quadrature(p) / pred)
    elapsed = time.perf_counter() - t0
    monotone = all(abs(1 - b) < abs(1 - a) for a, b in zip(ratios, ratios[1:]))
    gap = abs(1 - ratios[-1])
    ok = monotone and gap < 0.10 and elapsed < 60
    report(6, ok, "u(0)/prediction " + ", ".join(f"{r:.5f}" for r in ratios) + f" (final gap {gap:.2%}, "
                  f"{elapsed:.1f} s)")
    assert ok


# 7 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_07_exit_probabilities(report):
    # weights sqrt(eps/ell) in ratio 1:2. The O(sqrt(eps)) correction to each
    # escape rate favours the wider neck; at these gaps it moves p1 by about
    # 0.005 (under 2 stderr), at (0.01, 0.04) by about 0.009.
    necks = ((0.0025, 1.0), (0.01, 1.0))
    dom = FunnelDomain2D(1.0, (Neck(0.0025, 1.0, 1.0, 0.0), Neck(0.01, 1.0, 1.0, math.pi)))
    _, pred = asy.net_2d_multi_neck(necks, dom.area)
    est = simulate_exit_probs(dom, None, SimParams(dt=1e-3, n_paths=30_000, seed=707, refine_factor=1024))
    z = est.zscores(pred.probs)
    ok = bool(np.all(np.abs(z) <= 3)) and est.fpt.n_censored == 0
    report(7, ok, f"p = ({est.probs[0]:.4f}, {est.probs[1]:.4f}) vs ({pred[0]:.4f}, {pred[1]:.4f}), "
                  f"z = ({z[0]:+.2f}, {z[1]:+.2f}), {est.fpt.n_paths} paths")
    assert ok


# 8 -------------------------------------------------------------------------------------------


def test_criterion_08_telegraph_and_dumbbell(report):
    exact = telegraph_eigen(1, 2).eigenvalue == 3
    spec = DumbbellSpec(1.0, 1.0, 1.0, 1.0, 0.01, 1.0)
    r = asy.dumbbell_rates(spec)
    net = network_eigen(two_state(r.rate_12, r.rate_21)).relaxation_rate
    rel = abs(net - r.eigenvalue) / r.eigenvalue
    fit = simulate_telegraph(r.rate_12, r.rate_21, horizon=4e4 / r.eigenvalue, seed=808)
    rel_sim = abs(fit.relaxation / r.eigenvalue - 1)
    ok = exact and rel <= 1e-14 and rel_sim <= 0.10
    report(8, ok, f"telegraph_eigen(1,2) == 3: {exact}; dumbbell vs network rel diff {rel:.1e}; "
                  f"simulated relaxation off by {rel_sim:.1%} ({fit.n_events} switches)")
    assert ok


# 9 -------------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_09_needle_turnaround(report):
    sim = SimParams(dt=1e-4, n_paths=3000, seed=909, refine_factor=16)
    rows = _mc("needle_turnaround", {"l0": 1.0}, sim, "l", (0.99, 0.96))
    near, far = sorted(rows, key=lambda r: r["epsilon_like"])
    ratio = near["tau_mc"] / far["tau_mc"]
    abs_ratio = near["tau_mc"] / near["tau_pred"]
    ok = abs(ratio / 2 - 1) <= 0.20 and 1 / 1.5 <= abs_ratio <= 1.5
    report(9, ok, f"mean(delta)/mean(4 delta) = {ratio:.3f} (target 2 +/- 20%); mc/pred at delta 0.01 = "
                  f"{abs_ratio:.3f}, at 0.04 = {far['tau_mc'] / far['tau_pred']:.3f} (bound 1.5)")
    assert ok


# 10 ------------------------------------------------------------------------------------------


def test_criterion_10_consistency_identities(report):
    errs = {}
    for eps, R in ((0.01, 1.0), (0.002, 3.0)):
        g = asy.net_2d_funnel(PlanarFunnelSpec(eps, R, math.nextafter(R, 2 * R), area=2.0)).tau
        s = asy.net_2d_funnel(PlanarFunnelSpec(eps, R, R, area=2.0)).tau
        errs[f"general|Rc=rc eps={eps}"] = abs(g / s - 1)
    for a in (0.02, 0.005):
        errs[f"surface nu=1 a={a}"] = abs(asy.net_surface(2.0, a, 1.5, 1.0).tau / asy.net_surface_nu1(2.0, a, 1.5).tau - 1)
    one2, p2 = asy.net_2d_multi_neck([(0.01, 1.0)], 2.0)
    errs["planar N=1"] = abs(one2.tau / asy.net_2d_funnel(PlanarFunnelSpec(0.01, 1.0, 1.0, area=2.0)).tau - 1)
    one3, p3 = asy.net_3d_multi_neck([(0.01, 2.0)], 1.5)
    errs["3D N=1"] = abs(one3.tau / asy.net_3d_funnel(1.5, 2.0, 0.01).tau - 1)
    rng = np.random.default_rng(10)
    worst_sum = max(abs(p2.probs[0] - 1), abs(p3.probs[0] - 1))
    for _ in range(200):
        necks = list(zip(rng.uniform(1e-4, 0.1, 5), rng.uniform(0.1, 10, 5)))
        for f in (asy.net_2d_multi_neck, asy.net_3d_multi_neck):
            worst_sum = max(worst_sum, abs(sum(f(necks, 1.0)[1].probs) - 1))
    errs["probability sums"] = worst_sum
    worst = max(errs, key=errs.get)
    ok = all(v <= 1e-12 for v in errs.values())
    report(10, ok, f"{len(errs)} identities, worst {worst}: {errs[worst]:.1e}")
    assert ok
