"""Monte Carlo first-passage estimators.

Path ``i`` draws from ``SFC64(SeedSequence(seed, spawn_key=(i,)))``, results
land in preallocated per-path slots and are reduced in path order, so the
estimate does not depend on how many worker threads ran the paths.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from ..boundary_layer import DriftField
from ..geometry.domains import BallDomain, FunnelDomain2D, NeedleDomain, ProfileDomain
from ..geometry.specs import NeedleStripSpec
from . import kernels
from .params import EstimationError, ExitEstimate, FptEstimate, SimParams

WORKERS_ENV = "NARROW_ESCAPE_WORKERS"


def resolve_workers(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1


def path_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def run_paths(one_path: Callable, n_paths: int, seed: int, workers: Optional[int] = None):
    """Call ``one_path(rng)`` for every path; returns per-path arrays.

    ``one_path`` returns ``(time, window, status, rejections)``.
    """
    times = np.empty(n_paths)
    wins = np.empty(n_paths, dtype=np.int64)
    status = np.empty(n_paths, dtype=np.int8)
    rej = np.empty(n_paths, dtype=np.int64)

    def chunk(lo, hi):
        for i in range(lo, hi):
            times[i], wins[i], status[i], rej[i] = one_path(path_rng(seed, i))

    w = min(resolve_workers(workers), n_paths)
    if w == 1:
        chunk(0, n_paths)
    else:
        edges = np.linspace(0, n_paths, 4 * w + 1).astype(int)
        with ThreadPoolExecutor(max_workers=w) as ex:
            list(ex.map(lambda k: chunk(edges[k], edges[k + 1]), range(len(edges) - 1)))
    return times, wins, status, rej


def tail_pvalue(times: np.ndarray) -> float:
    """KS p-value that the excess over the median is exponential."""
    if times.size < 20:
        return float("nan")
    med = np.median(times)
    exc = times[times > med] - med
    if exc.size < 10 or exc.mean() <= 0:
        return float("nan")
    return float(stats.kstest(exc, "expon", args=(0.0, exc.mean())).pvalue)


def _estimate(times, status, rej, params: SimParams, wall, scale=1.0, extra=None) -> FptEstimate:
    done = status == 1
    n_abs = int(done.sum())
    if n_abs == 0:
        raise EstimationError(f"all {status.size} paths censored at max_time={params.max_time}")
    t = times[done] * scale
    mean = float(np.mean(t))
    se = float(np.std(t, ddof=1) / math.sqrt(n_abs)) if n_abs > 1 else 0.0
    return FptEstimate(mean, se, n_abs, int(status.size - n_abs), params.dt, int(params.seed), int(rej.sum()),
                       tail_pvalue(t), wall, t, dict(extra or {}))


def _instant(params: SimParams) -> FptEstimate:
    return FptEstimate(0.0, 0.0, int(params.n_paths), 0, params.dt, int(params.seed),
                       times=np.zeros(int(params.n_paths)), extra={"start_on_window": True})


def _check_start(domain, start):
    if start is None:
        return None
    start = np.asarray(start, dtype=float)
    if domain.on_window(start) >= 0:
        return "window"
    if not domain.contains(start):
        raise ValueError(f"start {start.tolist()} is not inside the domain")
    return start


def simulate_mfpt_2d(domain, start=None, params: SimParams = SimParams(), D: float = 1.0) -> FptEstimate:
    """Planar MFPT in a :class:`FunnelDomain2D` or a 2D :class:`ProfileDomain`/:class:`BallDomain`.

    ``start=None`` samples the start uniformly over the head.
    """
    if isinstance(domain, BallDomain):
        return _simulate_ball(domain, start, params, D, 2)
    if isinstance(domain, ProfileDomain):
        if domain.dim != 2:
            raise ValueError("profile domain must be planar")
        return _simulate_profile(domain, start, params, D)
    if not isinstance(domain, FunnelDomain2D):
        raise TypeError("expected FunnelDomain2D, ProfileDomain or BallDomain")
    est, _ = _simulate_funnel(domain, start, params, D)
    return est


def _simulate_funnel(domain: FunnelDomain2D, start, params, D):
    s = _check_start(domain, start)
    if isinstance(s, str):
        return _instant(params), np.full(params.n_paths, domain.on_window(start))
    head, necks = domain.arrays
    st = np.zeros(2) if s is None else s
    rnd = s is None
    refine = params.step_refine

    def one(rng):
        return kernels.funnel2d_path(rng, st, rnd, head, necks, D, params.dt, refine, params.max_time)

    t0 = time.perf_counter()
    times, wins, status, rej = run_paths(one, params.n_paths, params.seed, params.workers)
    est = _estimate(times, status, rej, params, time.perf_counter() - t0)
    return est, np.where(status == 1, wins, -1)


def _simulate_ball(domain: BallDomain, start, params, D, dim):
    if domain.dim != dim:
        raise ValueError(f"expected a {dim}-dimensional ball")
    st = np.zeros(3)
    if start is not None:
        s = _check_start(domain, start)
        if isinstance(s, str):
            return _instant(params)
        st[:dim] = s
    R = domain.radius

    def one(rng):
        return kernels.ball_path(rng, st, R, dim, D, params.dt, params.max_time)

    t0 = time.perf_counter()
    times, _, status, rej = run_paths(one, params.n_paths, params.seed, params.workers)
    return _estimate(times, status, rej, params, time.perf_counter() - t0)


def _simulate_profile(domain: ProfileDomain, start, params, D):
    s = _check_start(domain, start)
    if isinstance(s, str):
        return _instant(params)
    prof, rs = domain.arrays
    st = np.zeros(3)
    if s is not None:
        st[: s.size] = s
    rnd = s is None
    refine = params.step_refine

    def one(rng):
        return kernels.profile_path(rng, st, rnd, prof, rs, D, params.dt, refine, params.max_time)

    t0 = time.perf_counter()
    times, _, status, rej = run_paths(one, params.n_paths, params.seed, params.workers)
    return _estimate(times, status, rej, params, time.perf_counter() - t0)


def simulate_mfpt_3d(domain, start=None, params: SimParams = SimParams(), D: float = 1.0) -> FptEstimate:
    """MFPT in a solid of revolution (Cartesian simulation) or an absorbing ball."""
    if isinstance(domain, BallDomain):
        return _simulate_ball(domain, start, params, D, 3)
    if not isinstance(domain, ProfileDomain) or domain.dim != 3:
        raise TypeError("expected a 3D ProfileDomain or BallDomain")
    return _simulate_profile(domain, start, params, D)


def simulate_surface_1d(field: DriftField, start: float = 0.0, params: SimParams = SimParams()) -> FptEstimate:
    """Axial SDE ``dz = a dt + b dw``, reflecting at the pole, absorbing at ``Lambda``."""
    lam = field.Lambda
    if not lam <= start <= 0:
        raise ValueError("start must lie in [Lambda, 0]")
    if start == lam:
        return _instant(params)
    z = field.z
    hz = (z[-2] - z[0]) / (z.size - 2)
    if not np.allclose(np.diff(z[:-1]), hz, rtol=1e-9, atol=0):
        raise ValueError("drift field must be sampled on a uniform grid")
    a, b = np.ascontiguousarray(field.a_of_z), np.ascontiguousarray(field.b_of_z)
    refine = params.step_refine

    def one(rng):
        return kernels.surface_path(rng, float(start), float(z[0]), hz, a, b, lam, params.dt, refine,
                                    params.max_time)

    t0 = time.perf_counter()
    times, _, status, rej = run_paths(one, params.n_paths, params.seed, params.workers)
    return _estimate(times, status, rej, params, time.perf_counter() - t0)


def simulate_needle(spec: NeedleStripSpec, start=(0.0, 0.0), params: SimParams = SimParams()) -> FptEstimate:
    """Time for the needle to reach the vertical, doubled to give the turnaround time.

    ``extra["one_way_mean"]`` keeps the undoubled mean.
    """
    dom = NeedleDomain(spec)
    th0, y0 = float(start[0]), float(start[1])
    if dom.on_window((th0, y0)) >= 0:
        return _instant(params)
    if not dom.contains((th0, y0)):
        raise ValueError("start is not inside the configuration space")
    nd = dom.arrays[0]
    refine = params.step_refine

    def one(rng):
        return kernels.needle_path(rng, th0, y0, nd, params.dt, refine, params.max_time)

    t0 = time.perf_counter()
    times, _, status, rej = run_paths(one, params.n_paths, params.seed, params.workers)
    est = _estimate(times, status, rej, params, time.perf_counter() - t0, scale=2.0)
    est.extra["one_way_mean"] = est.mean / 2
    return est


def simulate_exit_probs(domain: FunnelDomain2D, start=None, params: SimParams = SimParams(),
                        D: float = 1.0) -> ExitEstimate:
    """Tally which window each path leaves through."""
    if not isinstance(domain, FunnelDomain2D) or len(domain.necks) < 2:
        raise ValueError("need a FunnelDomain2D with at least two necks")
    est, wins = _simulate_funnel(domain, start, params, D)
    n = len(domain.necks)
    hit = wins[wins >= 0]
    counts = np.bincount(hit, minlength=n)
    tot = counts.sum()
    probs = counts / tot
    se = np.sqrt(probs * (1 - probs) / tot)
    return ExitEstimate(tuple(float(x) for x in probs), tuple(float(x) for x in se),
                        tuple(int(c) for c in counts), est)
