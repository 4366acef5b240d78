from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

from .deterministic import deterministic_restarted_egm, egm_run
from .rsegm import rsegm_run, segm_norestart_run

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem

    from .run_trace import RunTrace
    from .solver_config import SolverConfig


class Algorithm(str, Enum):
    """Solvers selectable by command-line tag."""

    RSEGM = "rsegm"
    SEGM_NORESTART = "segm-norestart"
    DET_RESTART = "det-restart"
    DET_EGM = "det-egm"

    @property
    def is_deterministic(self) -> bool:
        return self in (Algorithm.DET_RESTART, Algorithm.DET_EGM)


def run_algorithm(
    algorithm: Algorithm | str,
    problem: BaseProblem,
    oracle: BaseOracle | None,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    rng: np.random.Generator | None = None,
) -> tuple[npt.NDArray[np.float64], RunTrace]:
    """
    Runs one solver. The deterministic baselines ignore ``oracle`` and ``rng``.

    Raises:
        ValueError: If a stochastic algorithm gets no oracle.
    """
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.DET_RESTART:
        return deterministic_restarted_egm(problem, config, z0)
    if algorithm is Algorithm.DET_EGM:
        return egm_run(problem, config, z0)
    if oracle is None:
        msg = f"{algorithm.value} needs a stochastic oracle."
        raise ValueError(msg)
    if algorithm is Algorithm.SEGM_NORESTART:
        return segm_norestart_run(problem, oracle, config, z0, rng)
    return rsegm_run(problem, oracle, config, z0, rng)
