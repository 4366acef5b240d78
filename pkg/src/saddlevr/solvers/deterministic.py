from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import DivergenceError
from saddlevr.oracles import OracleKind, make_problem_oracle
from saddlevr.problems import ProblemKind

from .run_trace import RunTrace
from .solver_config import SolverConfig, resolve_config

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseProblem

logger = logging.getLogger(__name__)

# restart length K = factor * |A|_2 / alpha when alpha is known
RESTART_LENGTH_FACTOR = 8.0


def resolve_deterministic_config(
    problem: BaseProblem,
    config: SolverConfig | None = None,
    z0: npt.NDArray[np.float64] | None = None,
) -> SolverConfig:
    """
    Resolves a config for the full-gradient baselines: p = 1, tau = 1 / (2 |A|_2).

    Raises:
        ValueError: If K is unset and no sharpness estimate is available.
    """
    config = config or SolverConfig()
    spectral = problem.norms.spectral
    alpha = problem.norms.sigma_min_plus if problem.kind is ProblemKind.BILINEAR else None
    inner_iters = config.inner_iters
    if inner_iters is None and alpha:
        inner_iters = max(1, math.ceil(config.multiplier * RESTART_LENGTH_FACTOR * spectral / alpha))
    oracle = make_problem_oracle(OracleKind.FULL, problem)
    return resolve_config(problem, oracle, config, z0, p=1.0, inner_iters=inner_iters, lazy=False)


def deterministic_restarted_egm(
    problem: BaseProblem,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    *,
    label: str = "det-restart",
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """
    Extragradient with exact operator evaluations, restarted every K steps.

    z_half = prox(z - tau F(z)); z = prox(z - tau F(z_half)). With
    ``restart_to_average`` each epoch restarts from its half-iterate average,
    otherwise from its last iterate, which makes the run plain EGM for any K.
    With averaging and K = 1 the restart point is the lone half-iterate, so each
    epoch is the projected step z = prox(z - tau F(z)); use
    ``restart_to_average=False`` for EGM. F at the current iterate is cached across steps, so each step costs two
    operator evaluations, the same as sEGM with p = 1 and the full oracle.

    Returns:
        The final restart point (or last iterate) and the trace.

    Raises:
        DivergenceError: If an iterate becomes non-finite.
    """
    config.validate()
    problem.check_iterate(z0)
    tau, iters = config.tau, config.inner_iters
    nnz = problem.matrix.nnz

    trace = RunTrace(algorithm=label, seed=config.seed, config=config.to_dict())
    trace.checkpoint(problem, z0, step=0, epoch=0, restart=True, gap_radius=config.gap_radius)
    z = np.array(z0, dtype=np.float64, copy=True)
    fz = problem.full_operator(z)
    trace.charge(nnz, nnz)

    for epoch in range(1, config.restarts + 1):  # type: ignore[operator]
        offset = (epoch - 1) * iters  # type: ignore[operator]
        half_sum = np.zeros_like(z)
        for k in range(1, iters + 1):  # type: ignore[operator]
            z_half = problem.prox_step(z - tau * fz, tau)  # type: ignore[operator]
            z = problem.prox_step(z - tau * problem.full_operator(z_half), tau)  # type: ignore[operator]
            fz = problem.full_operator(z)
            half_sum += z_half
            trace.charge(2 * nnz, 2 * nnz)
            if not np.all(np.isfinite(z)):
                raise DivergenceError(offset + k, trace)
            if config.record_every and k % config.record_every == 0 and k < iters:
                trace.checkpoint(problem, z, step=offset + k, epoch=epoch, restart=False, gap_radius=config.gap_radius)

        if config.restart_to_average:
            z = half_sum / iters
        trace.checkpoint(problem, z, step=offset + iters, epoch=epoch, restart=True, gap_radius=config.gap_radius)  # type: ignore[operator]
        if config.restart_to_average and epoch < config.restarts:  # type: ignore[operator]
            fz = problem.full_operator(z)
            trace.charge(nnz, nnz)

    trace.final = z
    return z, trace


def egm_run(
    problem: BaseProblem,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """Plain EGM over K * T steps, returning the last iterate."""
    return deterministic_restarted_egm(problem, replace(config, restart_to_average=False), z0, label="det-egm")
