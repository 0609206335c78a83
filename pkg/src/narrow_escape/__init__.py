"""Narrow escape times through funnel-shaped bottlenecks.

Closed-form leading-order predictions (:mod:`.asymptotics`), their
numerical companions (:mod:`.boundary_layer`), Monte Carlo first-passage
simulation (:mod:`.mc`), coarse Markov models (:mod:`.markov`) and an
experiment harness with a command line front end (:mod:`.harness`,
:mod:`.cli`).
"""

from __future__ import annotations

from . import asymptotics, boundary_layer, geometry, markov, mc
from .asymptotics import FormulaId, NetPrediction
from .boundary_layer import BleqSolution, DriftField, drift_field, solve_bleq, surface_mfpt_quadrature
from .markov import RateMatrix, network_eigen, simulate_telegraph, telegraph_eigen
from .mc import FptEstimate, SimParams

__version__ = "0.1.0"
