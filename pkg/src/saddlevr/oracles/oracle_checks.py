from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import UnsupportedSizeError

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle

    from .oracle_sample import OracleSample

MAX_OUTCOMES = 1_000_000


def exhaustive_expectation(oracle: BaseOracle, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """
    Exact E[F_xi(z)] + linear_offset, summed over every outcome of the oracle.

    Raises:
        UnsupportedSizeError: If the oracle has more than a million outcomes.
    """
    _check_support(oracle)
    total = np.zeros(oracle.dim)
    for prob, xi in oracle.outcomes():
        oracle.estimate(xi, z).add_to(total, prob)
    return total + oracle.linear_offset


def exhaustive_second_moment(
    oracle: BaseOracle,
    u: npt.NDArray[np.float64],
    v: npt.NDArray[np.float64],
) -> float:
    """E||F_xi(u) - F_xi(v)||^2 over every outcome, same xi at both points."""
    _check_support(oracle)
    moment = 0.0
    for prob, xi in oracle.outcomes():
        moment += prob * _squared_difference(oracle.estimate(xi, u), oracle.estimate(xi, v))
    return moment


def empirical_lipschitz_check(oracle: BaseOracle, trials: int, rng: np.random.Generator) -> float:
    """
    Largest observed E||F_xi(u) - F_xi(v)||^2 / ||u - v||^2 over random pairs.

    Pairs are standard normal; identical pairs contribute 0. The result is to be
    compared with ``oracle.lipschitz_bound ** 2``.
    """
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(oracle.dim)
        v = rng.standard_normal(oracle.dim)
        spread = float(np.sum((u - v) ** 2))
        if spread == 0.0:
            continue
        worst = max(worst, exhaustive_second_moment(oracle, u, v) / spread)
    return worst


def _squared_difference(first: OracleSample, second: OracleSample) -> float:
    if first.dense is not None and second.dense is not None:
        return float(np.sum((first.dense - second.dense) ** 2))
    # both samples come from the same xi, so the coordinate lists line up
    return float(np.sum((first.values - second.values) ** 2))


def _check_support(oracle: BaseOracle) -> None:
    if oracle.support_size > MAX_OUTCOMES:
        msg = f"Oracle has {oracle.support_size} outcomes; exhaustive checks stop at {MAX_OUTCOMES}."
        raise UnsupportedSizeError(msg)
