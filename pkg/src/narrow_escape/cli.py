"""Command line front end: ``narrow-escape {predict,simulate,compare,sweep,bleq,cases}``.

Every experiment subcommand takes either ``--config FILE`` or ``--case``
with ``--set key=value`` geometry overrides; simulation flags override the
``[sim]`` section. Output is CSV (schema in :data:`harness.CSV_COLUMNS`).

Exit codes: 0 success, 1 a ``compare``/``sweep`` gate failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import math
import sys
import warnings

from .boundary_layer import bleq_bounded_ic, solve_bleq
from .config import ConfigError, ExperimentConfig, parse_values
from .harness import CASES, HarnessError, build_rows, judge, loglog_slope, to_csv


def _experiment_args(p: argparse.ArgumentParser, sweep: bool = False):
    p.add_argument("--config", help="INI experiment file")
    p.add_argument("--case", help="case name (see the 'cases' subcommand)")
    p.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                   help="geometry parameter, repeatable")
    p.add_argument("--output", "-o", help="CSV path ('-' for stdout)")
    g = p.add_argument_group("simulation")
    g.add_argument("--dt", type=float)
    g.add_argument("--n-paths", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--max-time", type=float)
    g.add_argument("--refine-factor", type=int)
    g.add_argument("--no-adaptive", action="store_true")
    g.add_argument("--workers", type=int)
    s = p.add_argument_group("sweep")
    s.add_argument("--sweep-param")
    s.add_argument("--sweep-values", help="comma separated values")
    c = p.add_argument_group("gate")
    c.add_argument("--z-bound", type=float)
    c.add_argument("--ratio-tol", type=float)
    if sweep:
        c.add_argument("--predict-only", action="store_true", help="skip simulation")


def _load(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.read(args.config)
        if args.case and args.case != cfg.case:
            raise ConfigError("--case conflicts with the config file")
    elif args.case:
        cfg = ExperimentConfig(case=args.case)
    else:
        raise ConfigError("give --config or --case")
    geo = dict(cfg.geometry)
    for item in args.sets:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            geo[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--set {key}: not a number") from None
    sim_kw = {k: getattr(args, k) for k in ("dt", "n_paths", "seed", "max_time", "refine_factor", "workers")
              if getattr(args, k) is not None}
    if args.no_adaptive:
        sim_kw["adaptive"] = False
    try:
        sim = cfg.sim.with_(**sim_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    upd = dict(geometry=geo, sim=sim)
    if args.sweep_param is not None or args.sweep_values is not None:
        if not args.sweep_param:
            raise ConfigError("--sweep-values needs --sweep-param")
        upd["sweep_param"] = args.sweep_param
        upd["sweep_values"] = parse_values(args.sweep_values or "", "--sweep-values")
    if args.output is not None:
        upd["output"] = args.output
    if args.z_bound is not None:
        upd["z_bound"] = args.z_bound
    if args.ratio_tol is not None:
        upd["ratio_tol"] = args.ratio_tol
    return dataclasses.replace(cfg, **upd)


@contextlib.contextmanager
def _sink(path):
    if not path or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _run(cfg: ExperimentConfig, simulate: bool, gate: bool) -> int:
    rows = build_rows(cfg.case, cfg.geometry, simulate, cfg.sim, cfg.sweep_param, cfg.sweep_values)
    with _sink(cfg.output) as fh:
        to_csv(rows, fh)
    if not (simulate and gate):
        return 0
    failed = 0
    for r in rows:
        v = judge(r, cfg.z_bound, cfg.ratio_tol)
        failed += not v.ok
        print(f"{r['case']} eps={r['epsilon_like']:.6g} ratio={v.ratio:.4f} z={v.zscore:+.2f} "
              f"{'ok' if v.ok else 'FAIL'}", file=sys.stderr)
    if len(rows) >= 2 and all(r["epsilon_like"] > 0 for r in rows):
        print(f"log-log slope of tau_mc vs epsilon: {loglog_slope(rows):.3f}", file=sys.stderr)
    return 1 if failed else 0


def cmd_predict(args):
    return _run(_load(args), simulate=False, gate=False)


def cmd_simulate(args):
    return _run(_load(args), simulate=True, gate=False)


def cmd_compare(args):
    return _run(_load(args), simulate=True, gate=True)


def cmd_sweep(args):
    cfg = _load(args)
    if cfg.sweep_param is None:
        raise ConfigError("sweep needs --sweep-param/--sweep-values or a [sweep] section")
    return _run(cfg, simulate=not args.predict_only, gate=True)


def cmd_bleq(args):
    sol = solve_bleq(args.y0, args.dy0, xi_max=args.xi_max, coeff_scale=args.coeff_scale)
    kind = "slope" if sol.growing else "asymptote"
    print(f"Y(0)={args.y0:g} Y'(0)={args.dy0:g} xi_max={args.xi_max:g} coeff={args.coeff_scale:g}")
    print(f"{kind} = {sol.asymptote:.10g}")
    print(f"intercept = {sol.intercept:.10g}  slope = {sol.slope:.10g}")
    print(f"wronskian with reference solution = {sol.wronskian:.12g} (drift {sol.wronskian_drift:.2e})")
    # the equation is linear, so unit-norm initial data just rescale
    norm = math.hypot(args.y0, args.dy0)
    print(f"unit-normalized ICs ({args.y0 / norm:.6g}, {args.dy0 / norm:.6g}): {kind} = {sol.asymptote / norm:.10g}")
    if args.dy0 != 0:
        yb, yinf = bleq_bounded_ic(args.dy0, args.xi_max, args.coeff_scale)
        print(f"bounded solution with Y'(0)={args.dy0:g}: Y(0) = {yb:.10g}, Y(inf) = {yinf:.10g}")
    if args.output:
        sol.to_text(args.output)
    return 0


def cmd_cases(args):
    for name, c in sorted(CASES.items()):
        sim = "simulate" if c.simulate else "predict"
        keys = ", ".join(list(c.required) + [f"{k}={v:g}" for k, v in c.defaults.items()])
        print(f"{name:26s} [{sim}] {keys}" + (f"  -- {c.doc}" if c.doc else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="narrow-escape", description="Narrow escape time predictions and simulations")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (("predict", cmd_predict, "closed-form predictions"),
                               ("simulate", cmd_simulate, "Monte Carlo estimates next to predictions"),
                               ("compare", cmd_compare, "simulate and gate on z-score / ratio")):
        p = sub.add_parser(name, help=helptext)
        _experiment_args(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("sweep", help="compare over a parameter grid")
    _experiment_args(p, sweep=True)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("bleq", help="solve the boundary-layer equation")
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--dy0", type=float, required=True)
    p.add_argument("--xi-max", type=float, default=1e4)
    p.add_argument("--coeff-scale", type=float, default=0.25)
    p.add_argument("--output", "-o", help="two-column (xi, Y) text file")
    p.set_defaults(func=cmd_bleq)
    p = sub.add_parser("cases", help="list experiment cases")
    p.set_defaults(func=cmd_cases)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda m, c, *a, **k: print(f"warning: {m}", file=sys.stderr)
            return args.func(args)
    except (ConfigError, HarnessError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
