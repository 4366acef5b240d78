from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import UnsupportedProblemError, UnsupportedSizeError
from saddlevr.oracles.oracle_checks import MAX_OUTCOMES
from saddlevr.problems import ProblemKind
from saddlevr.solvers.run_trace import RunTrace
from saddlevr.solvers.segm import SegmState, segm_step

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem

# Monte-Carlo checks allow this many standard errors
SLACK_ERRORS = 3.0


@dataclass(frozen=True)
class DescentCheck:
    """
    One exact conditional step of phi(z) = (1 - p) |z_k - z|^2 + |w_k - z|^2.

    Attributes:
        phi: phi_k(z*).
        expected_phi: E_k[phi_{k+1}(z*)] over every oracle outcome and the coin.
        margin: phi - expected_phi - (p |z_half - w|^2 + E|z_half - z_next|^2) / 2.
    """

    phi: float
    expected_phi: float
    margin: float

    def holds(self, slack: float = 1e-10) -> bool:
        scale = max(1.0, self.phi)
        return self.expected_phi <= self.phi + slack * scale and self.margin >= -slack * scale


def descent_probe(
    problem: BaseProblem,
    oracle: BaseOracle,
    z: npt.NDArray[np.float64],
    w: npt.NDArray[np.float64],
    p: float,
    tau: float,
    z_star: npt.NDArray[np.float64],
) -> DescentCheck:
    """
    Exact one-step expectation of the sEGM potential from the state (z, w).

    The coin keeps w with probability 1 - p and moves it to z_next otherwise, so
    E[phi_{k+1}] = E|z_next - z*|^2 + (1 - p) |w - z*|^2.

    Raises:
        UnsupportedSizeError: If the oracle has too many outcomes to enumerate.
    """
    if oracle.support_size > MAX_OUTCOMES:
        msg = f"Oracle has {oracle.support_size} outcomes; the descent probe stops at {MAX_OUTCOMES}."
        raise UnsupportedSizeError(msg)

    fw = problem.full_operator(w)
    z_bar = (1.0 - p) * z + p * w
    z_half = problem.prox_step(z_bar - tau * fw, tau)

    next_dist = 0.0
    half_gap = 0.0
    for prob, xi in oracle.outcomes():
        direction = fw.copy()
        oracle.estimate(xi, z_half).add_to(direction)
        oracle.estimate(xi, w).add_to(direction, -1.0)
        z_next = problem.prox_step(z_bar - tau * direction, tau)
        next_dist += prob * float(np.sum((z_next - z_star) ** 2))
        half_gap += prob * float(np.sum((z_half - z_next) ** 2))

    w_dist = float(np.sum((w - z_star) ** 2))
    phi = (1.0 - p) * float(np.sum((z - z_star) ** 2)) + w_dist
    expected = next_dist + (1.0 - p) * w_dist
    margin = phi - expected - 0.5 * (p * float(np.sum((z_half - w) ** 2)) + half_gap)
    return DescentCheck(phi=phi, expected_phi=expected, margin=margin)


def random_descent_checks(
    problem: BaseProblem,
    oracle: BaseOracle,
    p: float,
    tau: float,
    z_star: npt.NDArray[np.float64],
    states: int,
    rng: np.random.Generator,
) -> list[DescentCheck]:
    """Descent probes at ``states`` standard normal (z, w) pairs; x is clamped at 0 for LPs."""
    checks = []
    for _ in range(states):
        z = rng.standard_normal(problem.dim)
        w = rng.standard_normal(problem.dim)
        mask = problem.nonneg_mask
        z[mask] = np.abs(z[mask])
        w[mask] = np.abs(w[mask])
        checks.append(descent_probe(problem, oracle, z, w, p, tau, z_star))
    return checks


@dataclass(frozen=True)
class BoundednessCheck:
    """Monte-Carlo mean of |z_{k+1/2} - z0| for every k against its bound."""

    bound: float
    means: npt.NDArray[np.float64]
    stderrs: npt.NDArray[np.float64]

    def holds(self) -> bool:
        return bool(np.all(self.means <= self.bound + SLACK_ERRORS * self.stderrs))


def boundedness_probe(
    problem: BaseProblem,
    oracle: BaseOracle,
    p: float,
    tau: float,
    z0: npt.NDArray[np.float64],
    z_star: npt.NDArray[np.float64],
    *,
    steps: int,
    trials: int,
    rng: np.random.Generator,
) -> BoundednessCheck:
    """
    Checks E|z_{k+1/2} - z0| <= (3 + sqrt(2 / (1 - p))) |z0 - z*| along ``steps`` iterations.

    Raises:
        ValueError: For p = 1, where the bound is infinite.
    """
    if not 0.0 < p < 1.0:
        msg = f"The boundedness probe needs p in (0, 1); got {p}."
        raise ValueError(msg)
    bound = (3.0 + math.sqrt(2.0 / (1.0 - p))) * float(np.linalg.norm(z0 - z_star))
    distances = np.empty((trials, steps))
    scratch = RunTrace(algorithm="probe", seed=0, config={})
    for trial in range(trials):
        state = SegmState.start(problem, z0)
        for k in range(steps):
            z_half = segm_step(problem, oracle, state, p, tau, rng, scratch)
            distances[trial, k] = np.linalg.norm(z_half - z0)
    return BoundednessCheck(
        bound=bound,
        means=distances.mean(axis=0),
        stderrs=distances.std(axis=0, ddof=1) / math.sqrt(trials),
    )


@dataclass(frozen=True)
class GapBoundCheck:
    """Monte-Carlo estimate of 2 tau E[max over C of the summed gap terms]."""

    bound: float
    mean: float
    stderr: float

    def holds(self) -> bool:
        return self.mean <= self.bound + SLACK_ERRORS * self.stderr


def gap_bound_probe(
    problem: BaseProblem,
    oracle: BaseOracle,
    p: float,
    tau: float,
    z0: npt.NDArray[np.float64],
    z_star: npt.NDArray[np.float64],
    grid: npt.NDArray[np.float64],
    *,
    steps: int,
    trials: int,
    rng: np.random.Generator,
) -> GapBoundCheck:
    """
    Checks 2 tau E[max_{z in C} sum_l <F(z_l), z_l - z>] against
    (7/2) max_{z in C} |z0 - z|^2 + 14 |z0 - z*|^2, z_l the half-iterates.

    With g = 0 the summed term is S1 - S2^T z with S1 = sum <F(z_l), z_l> and
    S2 = sum F(z_l), so the max over the grid is one matrix-vector product.

    Args:
        grid: Points of C, one per row.

    Raises:
        UnsupportedProblemError: Unless the problem is unconstrained bilinear.
    """
    if problem.kind is not ProblemKind.BILINEAR:
        msg = "The gap bound probe covers unconstrained bilinear problems only."
        raise UnsupportedProblemError(msg)
    grid = np.atleast_2d(grid)
    bound = 3.5 * float(np.max(np.sum((grid - z0) ** 2, axis=1))) + 14.0 * float(np.sum((z0 - z_star) ** 2))

    values = np.empty(trials)
    scratch = RunTrace(algorithm="probe", seed=0, config={})
    for trial in range(trials):
        state = SegmState.start(problem, z0)
        inner = 0.0
        summed = np.zeros(problem.dim)
        for _ in range(steps):
            z_half = segm_step(problem, oracle, state, p, tau, rng, scratch)
            f_half = problem.full_operator(z_half)
            inner += float(f_half @ z_half)
            summed += f_half
        values[trial] = 2.0 * tau * float(np.max(inner - grid @ summed))
    return GapBoundCheck(bound=bound, mean=float(values.mean()), stderr=float(values.std(ddof=1) / math.sqrt(trials)))
