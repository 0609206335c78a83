"""Monte Carlo first-passage simulation."""

from .engine import (
    WORKERS_ENV,
    path_rng,
    resolve_workers,
    run_paths,
    simulate_exit_probs,
    simulate_mfpt_2d,
    simulate_mfpt_3d,
    simulate_needle,
    simulate_surface_1d,
    tail_pvalue,
)
from .params import EstimationError, ExitEstimate, FptEstimate, SimParams
