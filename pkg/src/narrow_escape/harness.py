"""Named experiment cases and the prediction / simulation row builders.

A case turns a flat ``{key: float}`` parameter map into a closed-form
prediction and, where a simulator exists, a Monte Carlo estimate. Rows
follow the fixed CSV schema in :data:`CSV_COLUMNS`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from . import asymptotics as asy
from .boundary_layer import drift_field
from .geometry import (
    BallDomain,
    CompositeSpec,
    DumbbellSpec,
    FunnelDomain2D,
    NeedleStripSpec,
    PlanarFunnelSpec,
    ProfileDomain,
    profile_area,
    profile_volume,
    sphere_profile,
    tangent_circle_profile,
)
from .mc import FptEstimate, SimParams, simulate_mfpt_2d, simulate_mfpt_3d, simulate_needle, simulate_surface_1d

CSV_COLUMNS = ("case", "formula_id", "param_json", "epsilon_like", "tau_pred", "tau_mc", "stderr", "n_paths",
               "n_censored", "dt", "seed", "wall_time_s")


class HarnessError(RuntimeError):
    pass


class RegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Case:
    name: str
    defaults: dict
    required: tuple
    predict: Callable[[dict], asy.NetPrediction]
    epsilon: Callable[[dict], float]
    simulate: Optional[Callable[[dict, SimParams], FptEstimate]] = None
    doc: str = ""

    def params(self, given: dict) -> dict:
        p = dict(self.defaults)
        p.update(given)
        missing = [k for k in self.required if k not in p]
        if missing:
            raise HarnessError(f"case {self.name}: missing parameter(s) {', '.join(missing)}")
        return p


def _exact(fid, tau, echo):
    return asy.NetPrediction(fid, tau, "exact", echo)


def _indexed(p, *names):
    """Collect ``name1, name2, ...`` keys into a list of tuples."""
    idx = sorted({int(m.group(1)) for k in p for m in [re.fullmatch(rf"{names[0]}(\d+)", k)] if m})
    if not idx:
        raise HarnessError(f"need {names[0]}1, {names[0]}2, ... parameters")
    try:
        return [tuple(p[f"{n}{i}"] for n in names) for i in idx]
    except KeyError as exc:
        raise HarnessError(f"missing parameter {exc.args[0]}") from None


# -- calibrations -------------------------------------------------------------


def _ball_sim(dim):
    def run(p, sim):
        dom = BallDomain(p["R"], dim)
        f = simulate_mfpt_2d if dim == 2 else simulate_mfpt_3d
        return f(dom, [0.0] * dim, sim, p["D"])

    return run


# -- planar funnels -----------------------------------------------------------


def _planar_spec(p, symmetric):
    rc = p["Rc"] if symmetric else p["rc"]
    return PlanarFunnelSpec(p["eps"], p["Rc"], rc, area=p["area"])


def _planar_sim(symmetric):
    def run(p, sim):
        dom = FunnelDomain2D.from_spec(_planar_spec(p, symmetric))
        return simulate_mfpt_2d(dom, None, sim, p["D"])

    return run


# -- solids and surfaces with a tangent-circle neck --------------------------


def _realized(p):
    return "volume" not in p and "S" not in p


def _funnel3d_predict(p):
    if _realized(p):
        prof = tangent_circle_profile(p["a"], p["ell"], p["head_radius"])
        return asy.net_3d_funnel(profile_volume(prof), p["ell"], p["a"], p["D"])
    return asy.net_3d_funnel(p["volume"], p["ell"], p["a"], p["D"])


def _funnel3d_sim(p, sim):
    if not _realized(p):
        raise HarnessError("funnel_3d: simulation needs a realized geometry (give head_radius, not volume)")
    dom = ProfileDomain(tangent_circle_profile(p["a"], p["ell"], p["head_radius"]), 3)
    return simulate_mfpt_3d(dom, None, sim, p["D"])


def _surface_predict(p):
    if _realized(p):
        prof = tangent_circle_profile(p["a"], p["ell"], p["head_radius"])
        return asy.net_surface_nu1(profile_area(prof, prof.Lambda), p["a"], p["ell"], p["D"])
    return asy.net_surface_nu1(p["S"], p["a"], p["ell"], p["D"])


def _surface_sim(p, sim):
    if not _realized(p):
        raise HarnessError("surface_funnel_nu1: simulation needs a realized geometry (give head_radius, not S)")
    field = drift_field(tangent_circle_profile(p["a"], p["ell"], p["head_radius"]), p["D"])
    return simulate_surface_1d(field, 0.0, sim)


def _sphere_sim(p, sim):
    R = p["R"]
    field = drift_field(sphere_profile(R, p["delta"]), p["D"])
    z0 = -R * (1 + math.cos(p["theta"]))
    return simulate_surface_1d(field, min(z0, 0.0), sim)


# -- needle -------------------------------------------------------------------


def _needle_spec(p):
    return NeedleStripSpec(p["l0"], p["l"], p["DX"], p["DY"], p["Dr"])


def _dumbbell_predict(p):
    r = asy.dumbbell_rates(DumbbellSpec(p["omega1_vol"], p["omega3_vol"], p["Rc1"], p["Rc3"], p["a"], p["L"], p["D"]))
    return asy.NetPrediction(asy.FormulaId.DUMBBELL, 1.0 / r.eigenvalue, "relaxation time 1/(rate_12 + rate_21)",
                             dict(p), r.extrapolated, p["a"] / min(p["Rc1"], p["Rc3"]),
                             dict(rate_12=r.rate_12, rate_21=r.rate_21))


_D = {"D": 1.0}

CASES: dict[str, Case] = {c.name: c for c in [
    Case("disk_calibration", dict(R=1.0, **_D), (), lambda p: _exact("exact_disk", p["R"] ** 2 / (4 * p["D"]), p),
         lambda p: float("nan"), _ball_sim(2), "all-absorbing disk, start at the centre"),
    Case("ball_calibration", dict(R=1.0, **_D), (), lambda p: _exact("exact_ball", p["R"] ** 2 / (6 * p["D"]), p),
         lambda p: float("nan"), _ball_sim(3), "all-absorbing ball, start at the centre"),
    Case("net_2d_window", dict(**_D), ("area", "boundary_len", "window_len"),
         lambda p: asy.net_2d_window(p["area"], p["boundary_len"], p["window_len"], p["D"]),
         lambda p: math.pi * p["window_len"] / p["boundary_len"]),
    Case("net_3d_window", dict(L_curv=0.0, N_curv=0.0, **_D), ("volume", "a"),
         lambda p: asy.net_3d_window(p["volume"], p["a"], p["D"], p["L_curv"], p["N_curv"]), lambda p: p["a"]),
    Case("planar_funnel_symmetric", dict(Rc=1.0, area=math.pi, **_D), ("eps",),
         lambda p: asy.net_2d_funnel(_planar_spec(p, True), p["D"]), lambda p: p["eps"], _planar_sim(True),
         "two circles of radius Rc, gap eps, circular head of area |Omega|"),
    Case("planar_funnel_general", dict(area=math.pi, **_D), ("eps", "Rc", "rc"),
         lambda p: asy.net_2d_funnel(_planar_spec(p, False), p["D"]), lambda p: p["eps"], _planar_sim(False)),
    Case("planar_funnel_nu", dict(area=math.pi, ell=1.0, **_D), ("eps", "nu"),
         lambda p: asy.net_2d_funnel(PlanarFunnelSpec(p["eps"], p["ell"], p["ell"], p["nu"], p["nu"], p["ell"],
                                                      p["ell"], p["area"]), p["D"]),
         lambda p: p["eps"]),
    Case("planar_multi_neck", dict(area=math.pi, **_D), (),
         lambda p: asy.net_2d_multi_neck(_indexed(p, "eps", "ell"), p["area"], p["D"])[0],
         lambda p: min(e for e, _ in _indexed(p, "eps", "ell"))),
    Case("funnel_3d", dict(ell=1.0, head_radius=0.5, **_D), ("a",), _funnel3d_predict, lambda p: p["a"],
         _funnel3d_sim, "tangent-circle neck on a spherical head; give volume for a prediction only"),
    Case("funnel_3d_multi_neck", dict(**_D), ("volume",),
         lambda p: asy.net_3d_multi_neck(_indexed(p, "a", "ell"), p["volume"], p["D"])[0],
         lambda p: min(a for a, _ in _indexed(p, "a", "ell"))),
    Case("surface_funnel", dict(ell=1.0, **_D), ("S", "a", "nu"),
         lambda p: asy.net_surface(p["S"], p["a"], p["ell"], p["nu"], p["D"]), lambda p: p["a"]),
    Case("surface_funnel_nu1", dict(ell=1.0, head_radius=0.5, **_D), ("a",), _surface_predict, lambda p: p["a"],
         _surface_sim, "surface of the tangent-circle solid; give S for a prediction only"),
    Case("sphere_cap", dict(R=1.0, theta=math.pi, **_D), ("delta",),
         lambda p: asy.net_sphere_cap(p["R"], p["theta"], p["delta"], p["D"]), lambda p: p["delta"], _sphere_sim),
    Case("surface_with_cylinder", dict(ell=1.0, nu=1.0, **_D), ("S", "a", "cyl_len"),
         lambda p: asy.net_surface_with_cylinder(p["S"], p["a"], p["ell"], p["nu"], p["cyl_len"], p["D"]),
         lambda p: p["a"]),
    Case("cone", dict(head_integral=0.0, **_D), ("S", "a", "C", "cone_len"),
         lambda p: asy.net_cone(p["S"], p["a"], p["C"], p["cone_len"], p["D"], p["head_integral"]),
         lambda p: p["a"] / (p["C"] * p["cone_len"])),
    Case("composite", dict(dim=3.0, **_D), ("head_tau", "head_volume", "neck_radius", "neck_len"),
         lambda p: asy.net_composite(p["head_tau"], CompositeSpec(p["head_volume"], p["neck_radius"], p["neck_len"],
                                                                 dim=int(p["dim"])), p["D"]),
         lambda p: p["neck_radius"]),
    Case("dumbbell", dict(**_D), ("omega1_vol", "omega3_vol", "Rc1", "Rc3", "a", "L"), _dumbbell_predict,
         lambda p: p["a"]),
    Case("needle_turnaround", dict(l0=1.0, DX=1.0, DY=1.0, Dr=1.0), ("l",),
         lambda p: asy.needle_turnaround(_needle_spec(p)), lambda p: (p["l0"] - p["l"]) / p["l0"],
         lambda p, sim: simulate_needle(_needle_spec(p), (0.0, 0.0), sim)),
]}


# -- rows ---------------------------------------------------------------------


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def make_row(case: Case, p: dict, simulate: bool, sim: SimParams) -> dict:
    try:
        pred = case.predict(p)
    except (ValueError, KeyError) as exc:
        raise HarnessError(f"{case.name} {json.dumps(p, sort_keys=True)}: {exc}") from exc
    if pred.extrapolated:
        warnings.warn(f"{case.name}: small parameter {pred.small_param:.3g} outside the asymptotic regime",
                      RegimeWarning, stacklevel=2)
    row = dict(case=case.name, formula_id=str(pred.formula_id), param_json=json.dumps(p, sort_keys=True),
               epsilon_like=case.epsilon(p), tau_pred=pred.tau, tau_mc=None, stderr=None, n_paths=None,
               n_censored=None, dt=None, seed=None, wall_time_s=None)
    if simulate:
        if case.simulate is None:
            raise HarnessError(f"case {case.name} has no simulator")
        try:
            est = case.simulate(p, sim)
        except Exception as exc:
            raise HarnessError(f"{case.name} {row['param_json']}: simulation failed: {exc}") from exc
        row.update(tau_mc=est.mean, stderr=est.stderr, n_paths=est.n_paths, n_censored=est.n_censored,
                   dt=est.dt, seed=est.seed, wall_time_s=est.wall_time_s)
    return row


def build_rows(case_name: str, geometry: dict, simulate: bool, sim: SimParams = SimParams(),
               sweep_param: Optional[str] = None, sweep_values=()) -> list[dict]:
    """One row, or one row per sweep value sorted by ``epsilon_like``."""
    if case_name not in CASES:
        raise HarnessError(f"unknown case {case_name!r}")
    case = CASES[case_name]
    if sweep_param is None:
        grids = [dict(geometry)]
    else:
        if not sweep_values:
            raise HarnessError("sweep has no values")
        grids = [{**geometry, sweep_param: float(v)} for v in sweep_values]
    rows = [make_row(case, case.params(g), simulate, sim) for g in grids]
    rows.sort(key=lambda r: (math.isnan(r["epsilon_like"]), r["epsilon_like"]))
    return rows


def to_csv(rows, fh=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def read_csv(text: str) -> list[dict]:
    rdr = csv.DictReader(io.StringIO(text))
    if tuple(rdr.fieldnames or ()) != CSV_COLUMNS:
        raise HarnessError(f"unexpected columns {rdr.fieldnames}")
    return list(rdr)


@dataclass(frozen=True)
class Verdict:
    ratio: float
    zscore: float
    ok: bool


def judge(row: dict, z_bound: float = 3.0, ratio_tol: float = 0.25) -> Verdict:
    """A row passes when its z-score is within ``z_bound`` or its ratio within ``ratio_tol`` of 1."""
    pred, mc, se = row["tau_pred"], row["tau_mc"], row["stderr"]
    ratio = mc / pred if pred > 0 else (1.0 if mc == 0 else math.inf)
    z = (mc - pred) / se if se > 0 else (0.0 if mc == pred else math.inf)
    return Verdict(ratio, z, abs(z) <= z_bound or abs(ratio - 1) <= ratio_tol)


def loglog_slope(rows, key: str = "tau_mc") -> float:
    x = [math.log(r["epsilon_like"]) for r in rows]
    y = [math.log(r[key]) for r in rows]
    n = len(x)
    if n < 2:
        raise HarnessError("need at least two rows for a slope")
    mx, my = sum(x) / n, sum(y) / n
    return sum((a - mx) * (b - my) for a, b in zip(x, y)) / sum((a - mx) ** 2 for a in x)
