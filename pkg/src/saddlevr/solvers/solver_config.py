from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import TYPE_CHECKING, Any

from saddlevr.oracles import OracleKind
from saddlevr.problems import ProblemKind

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem
    from saddlevr.sparsela import SparseMatrixDual

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class SolverConfig:
    """
    Hyperparameters of one solver run.

    ``None`` fields are filled by ``resolve_config``; solvers only accept resolved
    configs.

    Attributes:
        p: Snapshot probability in (0, 1].
        tau: Step size.
        inner_iters: Iterations per epoch (K).
        restarts: Number of epochs (T).
        seed: Seed of the run's random stream.
        oracle_kind: Oracle used by the stochastic solvers.
        record_every: Inner-step checkpoint period; 0 records epoch ends only.
        lazy: Use the O(1)-per-step coordinate engine.
        multiplier: Scale of the default K.
        eps: Target distance used to derive the default T.
        restart_to_average: Deterministic baseline restarts from the average
            (True) or keeps its last iterate (False).
        gap_radius: Record the normalized duality gap at this radius.
    """

    p: float | None = None
    tau: float | None = None
    inner_iters: int | None = None
    restarts: int | None = None
    seed: int = 0
    oracle_kind: OracleKind = OracleKind.IMPORTANCE_RC
    record_every: int = 0
    lazy: bool = False
    multiplier: float = 1.0
    eps: float | None = None
    restart_to_average: bool = True
    gap_radius: float | None = None

    @property
    def is_resolved(self) -> bool:
        return None not in (self.p, self.tau, self.inner_iters, self.restarts)

    def validate(self) -> SolverConfig:
        """
        Raises:
            ValueError: If the config is unresolved or a field is out of range.
        """
        if not self.is_resolved:
            msg = "SolverConfig has unresolved fields; call resolve_config first."
            raise ValueError(msg)
        if not 0.0 < self.p <= 1.0:  # type: ignore[operator]
            msg = f"p must lie in (0, 1]; got {self.p}."
            raise ValueError(msg)
        if not self.tau > 0.0:  # type: ignore[operator]
            msg = f"tau must be positive; got {self.tau}."
            raise ValueError(msg)
        if self.inner_iters < 1 or self.restarts < 0:  # type: ignore[operator]
            msg = f"Need K >= 1 and T >= 0; got K={self.inner_iters}, T={self.restarts}."
            raise ValueError(msg)
        if self.record_every < 0:
            msg = f"record_every must be >= 0; got {self.record_every}."
            raise ValueError(msg)
        if self.gap_radius is not None and not self.gap_radius > 0.0:
            msg = f"gap_radius must be positive; got {self.gap_radius}."
            raise ValueError(msg)
        return self

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["oracle_kind"] = self.oracle_kind.value
        return data


def default_probability(kind: OracleKind, matrix: SparseMatrixDual) -> float:
    """(m + n) / nnz(A) for row/column kinds, 1 / nnz(A) for coordinate kinds, clamped to (0, 1]."""
    if kind is OracleKind.FULL or matrix.nnz == 0:
        return 1.0
    if kind.is_coordinate:
        return min(1.0, 1.0 / matrix.nnz)
    return min(1.0, (matrix.nrows + matrix.ncols) / matrix.nnz)


def default_step_size(lipschitz_bound: float, p: float) -> float:
    """sqrt(p) / (2 L); a zero operator takes unit steps."""
    if lipschitz_bound <= 0.0:
        return 1.0
    return math.sqrt(p) / (2.0 * lipschitz_bound)


def default_restarts(r0: float, eps: float) -> int:
    """max(ceil(log2(R0 / eps)), 1)."""
    if r0 <= eps:
        return 1
    return max(math.ceil(math.log2(r0 / eps)), 1)


def default_inner_iters(lipschitz_bound: float, alpha: float, p: float, restarts: int, multiplier: float = 1.0) -> int:
    """ceil(multiplier * (L / alpha) * T^2 / sqrt(p)), at least 1."""
    return max(1, math.ceil(multiplier * (lipschitz_bound / alpha) * max(restarts, 1) ** 2 / math.sqrt(p)))


def resolve_config(
    problem: BaseProblem,
    oracle: BaseOracle,
    config: SolverConfig | None = None,
    z0: npt.NDArray[np.float64] | None = None,
    **overrides: Any,
) -> SolverConfig:
    """
    Fills every unset field of ``config`` with its default for this problem and oracle.

    Args:
        problem: The problem to solve.
        oracle: The oracle the run will use; supplies L and the kind.
        config: Base config; a default one when omitted.
        z0: Starting point, used for R0 when T is derived from ``eps``.
        **overrides: Fields replacing those of ``config`` first.

    Returns:
        A validated, fully resolved config.

    Raises:
        ValueError: If K cannot be defaulted (no sharpness estimate) or a field is
            out of range.
    """
    config = replace(config or SolverConfig(), **overrides)
    p = config.p if config.p is not None else default_probability(oracle.kind, problem.matrix)
    tau = config.tau if config.tau is not None else default_step_size(oracle.lipschitz_bound, p)

    restarts = config.restarts
    if restarts is None:
        if config.eps is not None and z0 is not None and problem.has_distance:
            restarts = default_restarts(problem.distance_to_optimum(z0), config.eps)
        else:
            restarts = DEFAULT_RESTARTS

    inner_iters = config.inner_iters
    if inner_iters is None:
        alpha = problem.norms.sigma_min_plus if problem.kind is ProblemKind.BILINEAR else None
        if not alpha:
            msg = "inner_iters must be given when no sharpness estimate (sigma_min_plus) is available."
            raise ValueError(msg)
        inner_iters = default_inner_iters(oracle.lipschitz_bound, alpha, p, restarts, config.multiplier)

    resolved = replace(
        config,
        p=p,
        tau=tau,
        inner_iters=inner_iters,
        restarts=restarts,
        oracle_kind=oracle.kind,
    ).validate()
    logger.info(
        "Resolved config: p=%.6g tau=%.6g K=%d T=%d oracle=%s",
        resolved.p,
        resolved.tau,
        resolved.inner_iters,
        resolved.restarts,
        resolved.oracle_kind.value,
    )
    return resolved
