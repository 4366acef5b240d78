from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from saddlevr.errors import BisectionError, StructuralError, UnsupportedProblemError
from saddlevr.problems import ProblemKind

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseProblem

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-12
MAX_ITERATIONS = 200
# halvings of the lower multiplier before giving up on a bracket
MAX_BRACKET_STEPS = 2000
# brute-force gap reference: total samples, cap rounds, first cap width
REFERENCE_SAMPLES = 1_000_000
REFERENCE_ROUNDS = 9
CAP_START_WIDTH = 0.5


@dataclass(frozen=True)
class GapQuery:
    """A point and a radius for the normalized duality gap."""

    z: npt.NDArray[np.float64]
    r: float
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            msg = f"Gap radius must be positive; got {self.r}."
            raise ValueError(msg)


@dataclass(frozen=True)
class GapSolution:
    """
    Maximizer of g^T d over the feasible ball.

    Attributes:
        value: rho_r(z) = g^T d / r.
        direction: The maximizing step d = z_hat - z.
        multiplier: Ball multiplier lambda; 0 when the ball constraint is inactive.
    """

    value: float
    direction: npt.NDArray[np.float64]
    multiplier: float


def solve_gap(problem: BaseProblem, query: GapQuery) -> GapSolution:
    """
    Maximizes the duality gap L(x, y_hat) - L(x_hat, y) over W_r(z).

    The objective is g^T d with g = gap_linear_coefficients(z). Without sign
    constraints the maximizer is d = r g / |g|. With nonnegative coordinates
    d_i(lambda) = max(g_i / (2 lambda), -z_i) there, and ||d(lambda)|| = r is
    solved for lambda on a log scale.

    Raises:
        StructuralError: If ``z`` violates a sign constraint.
        BisectionError: If no multiplier reproduces the radius to tolerance.
    """
    z, r, tol = query.z, query.r, query.tolerance
    g = problem.gap_linear_coefficients(z)
    mask = problem.nonneg_mask
    norm_g = float(np.linalg.norm(g))

    if not mask.any():
        if norm_g == 0.0:
            return GapSolution(0.0, np.zeros_like(g), 0.0)
        return GapSolution(norm_g, (r / norm_g) * g, norm_g / (2.0 * r))

    if np.any(z[mask] < 0.0):
        msg = "Gap point violates the sign constraints of the problem."
        raise StructuralError(msg)
    if norm_g == 0.0:
        return GapSolution(0.0, np.zeros_like(g), 0.0)

    lower = np.where(mask, -z, -np.inf)

    def direction(lam: float) -> npt.NDArray[np.float64]:
        return np.maximum(g / (2.0 * lam), lower)

    unbounded = (~mask & (g != 0.0)) | (mask & (g > 0.0))
    if not unbounded.any():
        limit = np.where(g < 0.0, lower, 0.0)
        if float(np.linalg.norm(limit)) <= r:
            return GapSolution(float(g @ limit) / r, limit, 0.0)

    def excess(log_lam: float) -> float:
        return float(np.linalg.norm(direction(math.exp(log_lam)))) - r

    hi = math.log(norm_g / (2.0 * r))
    lo = hi - math.log(2.0)
    steps = 0
    while excess(lo) <= 0.0:
        lo -= math.log(2.0)
        steps += 1
        if steps > MAX_BRACKET_STEPS:
            msg = "Could not bracket the ball multiplier."
            raise BisectionError(msg)
    logger.debug("Gap multiplier bracket [%.6g, %.6g] after %d halvings", math.exp(lo), math.exp(hi), steps)

    try:
        root = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITERATIONS)
    except RuntimeError as e:
        msg = f"Root finding for the gap multiplier did not converge in {MAX_ITERATIONS} iterations."
        raise BisectionError(msg) from e

    lam = math.exp(root)
    d = direction(lam)
    miss = abs(float(np.linalg.norm(d)) - r)
    if miss > tol * r:
        msg = f"Gap multiplier misses the radius by {miss:.3e} (tolerance {tol * r:.3e})."
        raise BisectionError(msg)
    return GapSolution(float(g @ d) / r, d, lam)


def normalized_duality_gap(
    problem: BaseProblem,
    z: npt.NDArray[np.float64],
    r: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> float:
    """
    rho_r(z) = max over z_hat in W_r(z) of (L(x, y_hat) - L(x_hat, y)) / r.

    For an unconstrained bilinear problem this is |g| for every r.
    """
    return solve_gap(problem, GapQuery(z, r, tolerance)).value


def sampled_duality_gap(
    problem: BaseProblem,
    z: npt.NDArray[np.float64],
    r: float,
    rng: np.random.Generator,
    *,
    samples: int = REFERENCE_SAMPLES,
    rounds: int = REFERENCE_ROUNDS,
) -> float:
    """
    Brute-force rho_r(z) from sampled feasible points, for small instances.

    Every candidate is d = max(r u, -z) on the sign-constrained coordinates with u
    on the unit sphere, so it lies in W_r(z). Half of the samples sweep the whole
    sphere; the rest go to ``rounds`` caps around the best direction so far, each
    four times narrower than the last. The result never exceeds the true gap.

    Raises:
        StructuralError: If ``z`` violates a sign constraint.
        ValueError: If ``r`` is not positive or fewer than two samples per round remain.
    """
    if not r > 0.0:
        msg = f"Gap radius must be positive; got {r}."
        raise ValueError(msg)
    mask = problem.nonneg_mask
    if np.any(z[mask] < 0.0):
        msg = "Gap point violates the sign constraints of the problem."
        raise StructuralError(msg)
    sweep = samples // 2
    per_round = (samples - sweep) // max(rounds, 1)
    if sweep < 2 or (rounds and per_round < 2):
        msg = f"Too few samples ({samples}) for {rounds} refinement rounds."
        raise ValueError(msg)

    g = problem.gap_linear_coefficients(z)
    lower = np.where(mask, -z, -np.inf)

    def best_of(directions: npt.NDArray[np.float64]) -> tuple[float, npt.NDArray[np.float64]]:
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        values = np.maximum(r * directions, lower) @ g
        k = int(np.argmax(values))
        return float(values[k]), directions[k]

    value, center = best_of(rng.standard_normal((sweep, g.size)))
    width = CAP_START_WIDTH
    for _ in range(rounds):
        found, direction = best_of(center + width * rng.standard_normal((per_round, g.size)))
        if found > value:
            value, center = found, direction
        width /= 4.0
    return max(value, 0.0) / r


def subdifferential_distance(problem: BaseProblem, z: npt.NDArray[np.float64]) -> float:
    """
    dist(0, dL(z)) under the coordinate-wise normal-cone selection.

    Raises:
        UnsupportedProblemError: For problem forms without a known subdifferential.
    """
    if problem.kind not in (ProblemKind.BILINEAR, ProblemKind.LP):
        msg = f"Subdifferential distance is not defined for {problem.kind!r}."
        raise UnsupportedProblemError(msg)
    return float(np.linalg.norm(problem.subdifferential_residual(z)))
