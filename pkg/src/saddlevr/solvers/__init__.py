__all__ = [
    "Algorithm",
    "LazyIterateState",
    "RunTrace",
    "SegmState",
    "SolverConfig",
    "TraceRecord",
    "default_inner_iters",
    "default_probability",
    "default_restarts",
    "default_step_size",
    "deterministic_restarted_egm",
    "egm_run",
    "lazy_segm_run",
    "materialize",
    "resolve_config",
    "resolve_deterministic_config",
    "rsegm_run",
    "run_algorithm",
    "segm_norestart_run",
    "segm_run",
]

from .algorithm import Algorithm, run_algorithm
from .deterministic import deterministic_restarted_egm, egm_run, resolve_deterministic_config
from .lazy_engine import LazyIterateState, lazy_segm_run, materialize
from .rsegm import rsegm_run, segm_norestart_run
from .run_trace import RunTrace, TraceRecord
from .segm import SegmState, segm_run
from .solver_config import (
    SolverConfig,
    default_inner_iters,
    default_probability,
    default_restarts,
    default_step_size,
    resolve_config,
)
