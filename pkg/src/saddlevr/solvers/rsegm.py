from __future__ import annotations

import logging
from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np

from .run_trace import RunTrace
from .segm import run_epoch, segm_run

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem

    from .solver_config import SolverConfig

logger = logging.getLogger(__name__)


def rsegm_run(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator | None = None,
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """
    Restarted sEGM: T epochs of K steps, each started from the previous average.

    Every epoch resets its snapshot to its starting point. The trace holds one
    restart record per epoch boundary (epoch 0 is ``z0``) plus inner checkpoints
    when ``record_every`` is set.

    Returns:
        The last epoch's averaged output (``z0`` when T = 0) and the trace.

    Raises:
        DivergenceError: If an iterate becomes non-finite.
        StructuralError: If the oracle does not belong to the problem.
    """
    config.validate()
    oracle.check_problem(problem)
    problem.check_iterate(z0)
    rng = rng if rng is not None else np.random.default_rng(config.seed)

    trace = RunTrace(algorithm="rsegm", seed=config.seed, config=config.to_dict())
    trace.checkpoint(problem, z0, step=0, epoch=0, restart=True, gap_radius=config.gap_radius)
    z = np.array(z0, dtype=np.float64, copy=True)
    for epoch in range(1, config.restarts + 1):  # type: ignore[operator]
        offset = (epoch - 1) * config.inner_iters  # type: ignore[operator]
        z = run_epoch(problem, oracle, config, z, rng, trace, epoch=epoch, step_offset=offset)
        trace.checkpoint(problem, z, step=offset + config.inner_iters, epoch=epoch, restart=True, gap_radius=config.gap_radius)  # type: ignore[operator]
    trace.final = z
    return z, trace


def segm_norestart_run(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator | None = None,
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """sEGM without restarts over the same K * T budget as ``rsegm_run``."""
    config.validate()
    budget = config.inner_iters * max(config.restarts, 1)  # type: ignore[operator]
    return segm_run(problem, oracle, replace(config, inner_iters=budget), z0, rng, label="segm-norestart")
