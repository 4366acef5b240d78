from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import DivergenceError

from .lazy_engine import lazy_segm_epoch
from .run_trace import RunTrace

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem

    from .solver_config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class SegmState:
    """
    Mutable state of one sEGM epoch.

    Attributes:
        z: Current iterate z_k.
        w: Snapshot w_k.
        fw: F(w_k), linear offset included.
        half_sum: Sum of the k half-iterates produced so far.
        k: Steps taken.
    """

    z: npt.NDArray[np.float64]
    w: npt.NDArray[np.float64]
    fw: npt.NDArray[np.float64]
    half_sum: npt.NDArray[np.float64]
    k: int = 0

    @classmethod
    def start(cls, problem: BaseProblem, z0: npt.NDArray[np.float64]) -> SegmState:
        z = np.array(z0, dtype=np.float64, copy=True)
        return cls(z=z, w=z, fw=problem.full_operator(z), half_sum=np.zeros_like(z))

    def average(self) -> npt.NDArray[np.float64]:
        return self.half_sum / self.k


def segm_step(
    problem: BaseProblem,
    oracle: BaseOracle,
    state: SegmState,
    p: float,
    tau: float,
    rng: np.random.Generator,
    trace: RunTrace,
) -> npt.NDArray[np.float64]:
    """
    One iteration of the variance-reduced extragradient step, in place.

    Consumes the oracle's index draws first, then one uniform for the snapshot
    coin. Returns the half-iterate.
    """
    z_bar = (1.0 - p) * state.z + p * state.w
    z_half = problem.prox_step(z_bar - tau * state.fw, tau)

    xi = oracle.draw(rng)
    at_half = oracle.estimate(xi, z_half)
    if at_half.dense is not None:
        # Fw + F_xi(z_half) - F_xi(w) collapses to F(z_half) for the exact oracle
        direction = at_half.dense + oracle.linear_offset
        work = at_half.work
    else:
        at_snapshot = oracle.estimate(xi, state.w)
        direction = state.fw.copy()
        at_half.add_to(direction)
        at_snapshot.add_to(direction, -1.0)
        work = at_half.work + at_snapshot.work

    state.z = problem.prox_step(z_bar - tau * direction, tau)
    state.half_sum += z_half
    state.k += 1
    trace.charge(oracle.call_cost, work)

    if rng.random() < p:
        state.w = state.z
        state.fw = problem.full_operator(state.w)
        trace.charge(problem.matrix.nnz, problem.matrix.nnz)
    return z_half


def segm_epoch(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator,
    trace: RunTrace,
    *,
    epoch: int = 1,
    step_offset: int = 0,
) -> npt.NDArray[np.float64]:
    """
    Runs K dense sEGM iterations from ``z0`` and returns the half-iterate average.

    Raises:
        DivergenceError: If an iterate becomes non-finite.
    """
    p, tau, iters = config.p, config.tau, config.inner_iters
    state = SegmState.start(problem, z0)
    trace.charge(problem.matrix.nnz, problem.matrix.nnz)

    for _ in range(iters):  # type: ignore[arg-type]
        segm_step(problem, oracle, state, p, tau, rng, trace)  # type: ignore[arg-type]
        step = step_offset + state.k
        if not np.all(np.isfinite(state.z)):
            raise DivergenceError(step, trace)
        if config.record_every and state.k % config.record_every == 0 and state.k < iters:  # type: ignore[operator]
            trace.checkpoint(problem, state.z, step=step, epoch=epoch, restart=False, gap_radius=config.gap_radius)
    return state.average()


def segm_run(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator | None = None,
    *,
    label: str = "segm",
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """
    One epoch of stochastic extragradient with loopless variance reduction.

    Args:
        problem: The saddle-point problem.
        oracle: Estimator built for ``problem``.
        config: Resolved config; ``inner_iters`` is the epoch length.
        z0: Starting point; also the first snapshot.
        rng: Random stream; ``default_rng(config.seed)`` when omitted.
        label: Algorithm name stored in the trace.

    Returns:
        The average of the K half-iterates and the run's trace.

    Raises:
        DivergenceError: If an iterate becomes non-finite.
        StructuralError: If the oracle does not belong to the problem.
    """
    config.validate()
    oracle.check_problem(problem)
    problem.check_iterate(z0)
    rng = rng if rng is not None else np.random.default_rng(config.seed)

    trace = RunTrace(algorithm=label, seed=config.seed, config=config.to_dict())
    trace.checkpoint(problem, z0, step=0, epoch=0, restart=True, gap_radius=config.gap_radius)
    z_avg = run_epoch(problem, oracle, config, z0, rng, trace, epoch=1, step_offset=0)
    trace.checkpoint(problem, z_avg, step=config.inner_iters, epoch=1, restart=True, gap_radius=config.gap_radius)  # type: ignore[arg-type]
    trace.final = z_avg
    return z_avg, trace


def run_epoch(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator,
    trace: RunTrace,
    *,
    epoch: int,
    step_offset: int,
) -> npt.NDArray[np.float64]:
    """Dispatches one epoch to the dense loop or the lazy coordinate engine."""
    if config.lazy:
        return lazy_segm_epoch(problem, oracle, config, z0, rng, trace, epoch=epoch, step_offset=step_offset)
    return segm_epoch(problem, oracle, config, z0, rng, trace, epoch=epoch, step_offset=step_offset)

