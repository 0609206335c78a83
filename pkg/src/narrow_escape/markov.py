"""Coarse-grained jump processes between compartments.

A :class:`RateMatrix` is the generator ``Q`` of a continuous-time Markov
chain: ``Q[i, j]`` is the rate from ``i`` to ``j`` and rows sum to zero.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_ROW_TOL = 1e-14


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class RateMatrix:
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 1:
            raise GeneratorError("generator must be a square matrix")
        off = q - np.diag(np.diag(q))
        if np.any(off < 0):
            raise GeneratorError("off-diagonal rates must be non-negative")
        scale = max(1.0, float(np.abs(q).max()))
        if np.any(np.abs(q.sum(axis=1)) > _ROW_TOL * scale * q.shape[0]):
            raise GeneratorError("rows of a generator must sum to zero")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @classmethod
    def from_rates(cls, n: int, rates) -> "RateMatrix":
        """Build from ``{(i, j): rate}`` or an iterable of ``(i, j, rate)``."""
        items = rates.items() if isinstance(rates, dict) else (((i, j), r) for i, j, r in rates)
        q = np.zeros((n, n))
        for (i, j), r in items:
            if i == j:
                raise GeneratorError("self-transitions are not rates")
            q[i, j] += r
        q[np.diag_indices(n)] = -q.sum(axis=1)
        return cls(q)

    def to_triplets(self) -> str:
        """Plain ``i j rate`` lines for the non-zero off-diagonal entries."""
        buf = io.StringIO()
        buf.write(f"# n {self.n}\n")
        for i in range(self.n):
            for j in range(self.n):
                if i != j and self.q[i, j] != 0:
                    buf.write(f"{i} {j} {float(self.q[i, j])!r}\n")
        return buf.getvalue()

    @classmethod
    def from_triplets(cls, text: str) -> "RateMatrix":
        n = None
        trip = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "n":
                    n = int(parts[1])
                continue
            i, j, r = line.split()
            trip.append((int(i), int(j), float(r)))
        if n is None:
            n = 1 + max(max(i, j) for i, j, _ in trip)
        return cls.from_rates(n, trip)

    def stationary(self) -> np.ndarray:
        """Left null vector normalized to a probability distribution."""
        a = np.vstack([self.q.T, np.ones(self.n)])
        b = np.zeros(self.n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(a, b, rcond=None)
        return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()

    def is_reversible(self, tol: float = 1e-10) -> bool:
        pi = self.stationary()
        flux = pi[:, None] * self.q
        return bool(np.allclose(flux, flux.T, atol=tol * max(1.0, float(np.abs(flux).max()))))

    def permuted(self, perm: Sequence[int]) -> "RateMatrix":
        p = np.asarray(perm)
        return RateMatrix(self.q[np.ix_(p, p)])


@dataclass(frozen=True)
class TelegraphEigen:
    eigenvalue: float
    stationary: tuple


def telegraph_eigen(rate_ab: float, rate_ba: float) -> TelegraphEigen:
    """Non-zero relaxation rate and stationary law of the two-state chain."""
    if not (rate_ab > 0 and rate_ba > 0):
        raise ValueError("rates must be positive")
    lam = rate_ab + rate_ba
    return TelegraphEigen(lam, (rate_ba / lam, rate_ab / lam))


def two_state(rate_ab: float, rate_ba: float) -> RateMatrix:
    return RateMatrix(np.array([[-rate_ab, rate_ab], [rate_ba, -rate_ba]]))


def chain_generator(forward: Sequence[float], backward: Sequence[float]) -> RateMatrix:
    """Nearest-neighbour chain ``0 <-> 1 <-> ... <-> n-1``.

    ``forward[k]`` is the rate ``k -> k+1`` and ``backward[k]`` the rate
    ``k+1 -> k``. A head-neck-head dumbbell is the three-state case.
    """
    if len(forward) != len(backward):
        raise ValueError("forward and backward rates must have equal length")
    n = len(forward) + 1
    trip = [(k, k + 1, f) for k, f in enumerate(forward)] + [(k + 1, k, b) for k, b in enumerate(backward)]
    return RateMatrix.from_rates(n, trip)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    reversible: bool
    stationary: np.ndarray

    @property
    def relaxation_rate(self) -> float:
        """Magnitude of the slowest non-zero eigenvalue."""
        ev = np.asarray(self.eigenvalues)
        return float(-np.real(ev[1])) if ev.size > 1 else 0.0


def network_eigen(rates: RateMatrix) -> Spectrum:
    """Spectrum of the generator sorted from 0 downwards.

    Reversible chains are symmetrized with the stationary law so the
    spectrum comes out exactly real.
    """
    if not isinstance(rates, RateMatrix):
        rates = RateMatrix(np.asarray(rates))
    q = rates.q
    pi = rates.stationary()
    rev = rates.is_reversible() and np.all(pi > 0)
    if rev:
        s = np.sqrt(pi)
        sym = s[:, None] * q / s[None, :]
        ev = np.linalg.eigvalsh(0.5 * (sym + sym.T))
        ev = ev[np.argsort(-ev)]
        ev[0] = 0.0 if abs(ev[0]) <= 1e-12 * max(1.0, abs(ev[-1])) else ev[0]
    else:
        ev = np.linalg.eigvals(q)
        ev = ev[np.argsort(-ev.real)]
        if np.all(np.abs(ev.imag) < 1e-12 * max(1.0, np.abs(ev).max())):
            ev = ev.real
    return Spectrum(ev, bool(rev), pi)


@dataclass(frozen=True)
class TelegraphFit:
    relaxation: float
    n_events: int
    occupation_a: float
    occupation_stderr: float
    lags: np.ndarray
    autocov: np.ndarray


def simulate_telegraph(rate_ab: float, rate_ba: float, horizon: float, seed: int = 0,
                       samples_per_relax: int = 20, max_lag_relax: float = 1.5) -> TelegraphFit:
    """Jump simulation of the two-state chain and a log-linear fit of its autocovariance.

    The indicator of state ``a`` is sampled every ``1/(samples_per_relax
    lambda)``, where ``lambda = rate_ab + rate_ba``; its autocovariance is
    fitted on lags up to ``max_lag_relax / lambda``.
    """
    if not (rate_ab > 0 and rate_ba > 0 and horizon > 0):
        raise ValueError("rates and horizon must be positive")
    rng = np.random.default_rng(seed)
    lam = rate_ab + rate_ba
    p_a = rate_ba / lam
    start_a = rng.random() < p_a
    mean_cycle = 1 / rate_ab + 1 / rate_ba
    n_cycles = int(horizon / mean_cycle * 1.2) + 50
    while True:
        hold_a = rng.exponential(1 / rate_ab, n_cycles)
        hold_b = rng.exponential(1 / rate_ba, n_cycles)
        holds = np.empty(2 * n_cycles)
        if start_a:
            holds[0::2], holds[1::2] = hold_a, hold_b
        else:
            holds[0::2], holds[1::2] = hold_b, hold_a
        jumps = np.cumsum(holds)
        if jumps[-1] >= horizon:
            break
        n_cycles *= 2
    jumps = jumps[jumps < horizon]
    n_events = int(jumps.size)
    if n_events < 100:
        raise ValueError(f"only {n_events} switching events; lengthen the horizon")
    dt = 1.0 / (samples_per_relax * lam)
    grid = np.arange(0.0, horizon, dt)
    k = np.searchsorted(jumps, grid, side="right")
    in_a = ((k % 2 == 0) == start_a).astype(float)
    occ = float(in_a.mean())
    x = in_a - occ
    n_lag = max(3, int(max_lag_relax * samples_per_relax))
    lags = np.arange(n_lag + 1)
    cov = np.array([x[: x.size - j] @ x[j:] / (x.size - j) for j in lags])
    keep = cov > 0.05 * cov[0]
    slope = np.polyfit(lags[keep] * dt, np.log(cov[keep]), 1)[0]
    se = math.sqrt(2 * p_a * (1 - p_a) / (lam * horizon))
    return TelegraphFit(float(-slope), n_events, occ, se, lags * dt, cov)
