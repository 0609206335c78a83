from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class EstimationError(RuntimeError):
    """No path reached the window before ``max_time``."""


@dataclass(frozen=True)
class SimParams:
    """Integration and sampling controls.

    ``refine_factor`` divides ``dt`` while the particle is within
    ``4 sqrt(2 D dt)`` of a window (when ``adaptive``). ``workers=None``
    defers to the ``NARROW_ESCAPE_WORKERS`` environment variable.
    """

    dt: float = 1e-4
    n_paths: int = 1000
    seed: int = 12345
    max_time: float = 1e4
    adaptive: bool = True
    refine_factor: int = 16
    workers: Optional[int] = None

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if int(self.n_paths) < 1:
            raise ValueError("n_paths must be at least 1")
        if not self.max_time > 0:
            raise ValueError("max_time must be positive")
        if int(self.refine_factor) < 1:
            raise ValueError("refine_factor must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.workers is not None and int(self.workers) < 1:
            raise ValueError("workers must be at least 1")

    def with_(self, **kw) -> "SimParams":
        return replace(self, **kw)

    @property
    def step_refine(self) -> int:
        return int(self.refine_factor) if self.adaptive else 1


@dataclass(frozen=True)
class FptEstimate:
    """Mean first-passage time over the absorbed paths.

    Censored paths (still alive at ``max_time``) are counted, not dropped
    silently; ``flagged`` is set when they exceed 1% of the paths.
    ``tail_pvalue`` is the Kolmogorov-Smirnov p-value of the exponential
    fit to the excess over the median.
    """

    mean: float
    stderr: float
    n_absorbed: int
    n_censored: int
    dt: float
    seed: int
    n_rejected: int = 0
    tail_pvalue: float = float("nan")
    wall_time_s: float = 0.0
    times: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("negative standard error")

    @property
    def n_paths(self) -> int:
        return self.n_absorbed + self.n_censored

    @property
    def flagged(self) -> bool:
        return self.n_censored > 0.01 * self.n_paths

    def ci(self, z: float = 1.96) -> tuple[float, float]:
        return self.mean - z * self.stderr, self.mean + z * self.stderr

    def zscore(self, target: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.stderr


@dataclass(frozen=True)
class ExitEstimate:
    """Empirical exit probabilities per window, with binomial standard errors."""

    probs: tuple
    stderr: tuple
    counts: tuple
    fpt: FptEstimate

    def zscores(self, expected) -> np.ndarray:
        p, s = np.asarray(self.probs), np.asarray(self.stderr)
        e = np.asarray(expected, dtype=float)
        return (p - e) / np.where(s > 0, s, np.inf)
