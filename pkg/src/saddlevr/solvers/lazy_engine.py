from __future__ import annotations

import copy
import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import DivergenceError, UnsupportedProblemError
from saddlevr.oracles import CoordinateOracle
from saddlevr.problems import ProblemKind

from .run_trace import RunTrace

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem

    from .solver_config import SolverConfig

logger = logging.getLogger(__name__)

FLUSH_THRESHOLD = 1e-200


class LazyIterateState:
    """
    Affine representation of the sEGM iterate between snapshot refreshes.

    With prox = identity the step reads z_half = (1 - p) z + u, u = p w - tau F(w),
    then z_next = z_half - tau delta with a two-coordinate delta. The iterate is
    kept as ``scale * anchor + u_coef * u`` so that the dense part of a step only
    updates two scalars; the sparse delta is written into ``anchor`` divided by the
    current scale. The half-iterate sum since the last fold is

        half_scale_sum * anchor - half_correction + half_u_sum * u

    where ``half_correction`` compensates anchor writes made after earlier
    half-iterates were already counted.
    """

    def __init__(self, problem: BaseProblem, p: float, tau: float, z0: npt.NDArray[np.float64]) -> None:
        self.problem = problem
        self.p = p
        self.tau = tau
        dim = problem.dim
        self.anchor = np.array(z0, dtype=np.float64, copy=True)
        self.snapshot = self.anchor.copy()
        self.u = np.zeros(dim)
        self.scale = 1.0
        self.u_coef = 0.0
        self.half_scale_sum = 0.0
        self.half_u_sum = 0.0
        self.half_correction = np.zeros(dim)
        self.half_total = np.zeros(dim)
        self.half_count = 0
        self.steps = 0
        self.flushes = 0
        self.refreshes = 0
        self.refresh()

    def value(self, coord: int) -> float:
        return self.scale * self.anchor[coord] + self.u_coef * self.u[coord]

    def materialize(self) -> npt.NDArray[np.float64]:
        """Dense current iterate; does not change the state."""
        return self.scale * self.anchor + self.u_coef * self.u

    def half_sum(self) -> npt.NDArray[np.float64]:
        return self.half_total + self.half_scale_sum * self.anchor - self.half_correction + self.half_u_sum * self.u

    def average(self) -> npt.NDArray[np.float64]:
        return self.half_sum() / self.half_count

    def advance(self) -> None:
        """Moves to the next half-iterate and counts it in the running sum."""
        keep = 1.0 - self.p
        self.scale *= keep
        self.u_coef = keep * self.u_coef + 1.0
        if self.scale < FLUSH_THRESHOLD:
            self.flush()
        self.half_scale_sum += self.scale
        self.half_u_sum += self.u_coef
        self.half_count += 1
        self.steps += 1

    def correct(self, coord: int, delta: float) -> None:
        """Adds ``delta`` to the current iterate at ``coord``."""
        shift = delta / self.scale
        self.anchor[coord] += shift
        self.half_correction[coord] += shift * self.half_scale_sum

    def flush(self) -> None:
        """Folds the running sums and rescales the anchor to ``scale = 1``."""
        self._fold()
        self.anchor *= self.scale
        self.scale = 1.0
        self.flushes += 1
        logger.debug("Lazy state flushed after %d steps", self.steps)

    def refresh(self) -> npt.NDArray[np.float64]:
        """
        Takes the current iterate as the new snapshot; O(nnz(A) + m + n).

        Returns:
            F at the new snapshot.
        """
        z = self.materialize()
        self._fold()
        self.snapshot = z
        fw = self.problem.full_operator(z)
        self.u = self.p * z - self.tau * fw
        self.anchor = z.copy()
        self.scale = 1.0
        self.u_coef = 0.0
        self.steps = 0
        self.refreshes += 1
        return fw

    def rebased(self) -> LazyIterateState:
        """Copy with the iterate stored directly in ``anchor`` and the sums folded."""
        twin = copy.copy(self)
        twin.anchor = self.materialize()
        twin.half_total = self.half_sum()
        twin.half_correction = np.zeros_like(self.half_correction)
        twin.scale = 1.0
        twin.u_coef = 0.0
        twin.half_scale_sum = 0.0
        twin.half_u_sum = 0.0
        return twin

    def _fold(self) -> None:
        if self.half_scale_sum or self.half_u_sum:
            self.half_total = self.half_sum()
        self.half_scale_sum = 0.0
        self.half_u_sum = 0.0
        self.half_correction = np.zeros_like(self.half_correction)


def materialize(state: LazyIterateState) -> npt.NDArray[np.float64]:
    return state.materialize()


def lazy_segm_epoch(
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
    K sEGM iterations with O(1) work between snapshot refreshes.

    Draws the two entry indices, then the snapshot coin, exactly like the dense
    loop, so both paths follow the same random stream.

    Raises:
        UnsupportedProblemError: Unless the problem is bilinear and the oracle a
            coordinate oracle.
        DivergenceError: If an iterate becomes non-finite.
    """
    _check_supported(problem, oracle)
    p, tau, iters = config.p, config.tau, config.inner_iters
    n = problem.n
    state = LazyIterateState(problem, p, tau, z0)  # type: ignore[arg-type]
    trace.charge(problem.matrix.nnz, problem.matrix.nnz)

    rows, cols = oracle.entry_rows, oracle.entry_cols  # type: ignore[attr-defined]
    x_coef, y_coef = oracle.x_coef, oracle.y_coef  # type: ignore[attr-defined]
    for k in range(1, iters + 1):  # type: ignore[operator]
        kx, ky = oracle.draw(rng)
        state.advance()
        w = state.snapshot

        # both reads happen at the half-iterate, before either write
        x_target, x_source = int(cols[kx]), n + int(rows[kx])
        y_target, y_source = n + int(rows[ky]), int(cols[ky])
        dx = x_coef[kx] * (state.value(x_source) - w[x_source])
        dy = y_coef[ky] * (state.value(y_source) - w[y_source])
        state.correct(x_target, -tau * dx)  # type: ignore[operator]
        state.correct(y_target, -tau * dy)  # type: ignore[operator]
        trace.charge(oracle.call_cost, 2)

        step = step_offset + k
        if not (math.isfinite(state.anchor[x_target]) and math.isfinite(state.anchor[y_target])):
            raise DivergenceError(step, trace)

        if rng.random() < p:  # type: ignore[operator]
            state.refresh()
            trace.charge(problem.matrix.nnz, problem.matrix.nnz)
            if not np.all(np.isfinite(state.snapshot)):
                raise DivergenceError(step, trace)
        if config.record_every and k % config.record_every == 0 and k < iters:  # type: ignore[operator]
            trace.checkpoint(problem, state.materialize(), step=step, epoch=epoch, restart=False, gap_radius=config.gap_radius)

    logger.debug("Lazy epoch %d: %d refreshes, %d flushes", epoch, state.refreshes, state.flushes)
    return state.average()


def lazy_segm_run(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator | None = None,
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """
    Single sEGM epoch on the lazy engine; same output as the dense run for the
    same stream, up to rounding.

    Raises:
        UnsupportedProblemError: Unless the problem is bilinear and the oracle a
            coordinate oracle.
    """
    config.validate()
    oracle.check_problem(problem)
    problem.check_iterate(z0)
    _check_supported(problem, oracle)
    rng = rng if rng is not None else np.random.default_rng(config.seed)

    trace = RunTrace(algorithm="segm", seed=config.seed, config=config.to_dict())
    trace.checkpoint(problem, z0, step=0, epoch=0, restart=True, gap_radius=config.gap_radius)
    z_avg = lazy_segm_epoch(problem, oracle, config, z0, rng, trace)
    trace.checkpoint(problem, z_avg, step=config.inner_iters, epoch=1, restart=True, gap_radius=config.gap_radius)  # type: ignore[arg-type]
    trace.final = z_avg
    return z_avg, trace


def _check_supported(problem: BaseProblem, oracle: BaseOracle) -> None:
    if problem.kind is not ProblemKind.BILINEAR:
        msg = "The lazy engine needs an unconstrained bilinear problem; the LP prox is not affine."
        raise UnsupportedProblemError(msg)
    if not isinstance(oracle, CoordinateOracle):
        msg = f"The lazy engine needs a coordinate oracle, got {oracle.kind.value}."
        raise UnsupportedProblemError(msg)
