"""percosweep: dynamic-connectivity percolation engine and sweep sampler.

Estimates the square site percolation threshold by walking the occupation
level back and forth through the critical window with constant-time cluster
updates for both site occupation and removal.
"""

from .analysis import (
    CrossingCriterion,
    NoCrossingError,
    SpanningCurve,
    ThresholdEstimate,
    crossing_target,
    estimate_R,
    estimate_pc,
)
from .backend import HAVE_COMPILED, available_backends, backend_name, make_engine
from .dynamic_graph import ArenaExhaustedError, FragmentReport, GraphArena
from .lattice import SiteLattice, boundary_mask_of, dump_config, parse_config, restore_config
from .rng import MT19937, LaggedFibonacci, RngStream, bounded_uniform
from .sweep import (
    PythonEngine,
    SitePicker,
    SweepCounters,
    SweepPlan,
    critical_window,
    estimate_decorrelation,
    mc_step,
    record_sample,
    run_sweeps,
)

__version__ = "0.1.0"

__all__ = [
    "ArenaExhaustedError",
    "CrossingCriterion",
    "FragmentReport",
    "GraphArena",
    "HAVE_COMPILED",
    "LaggedFibonacci",
    "MT19937",
    "NoCrossingError",
    "PythonEngine",
    "RngStream",
    "SiteLattice",
    "SitePicker",
    "SpanningCurve",
    "SweepCounters",
    "SweepPlan",
    "ThresholdEstimate",
    "available_backends",
    "backend_name",
    "boundary_mask_of",
    "bounded_uniform",
    "critical_window",
    "crossing_target",
    "dump_config",
    "estimate_R",
    "estimate_decorrelation",
    "estimate_pc",
    "make_engine",
    "mc_step",
    "parse_config",
    "record_sample",
    "restore_config",
    "run_sweeps",
]
