from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from saddlevr.errors import GenerationError
from saddlevr.sparsela import SparseMatrixDual, build_matrix, compute_norms
from saddlevr.sparsela.matrix_norms import SIGMA_MIN_SIZE_LIMIT

from .bilinear_problem import BilinearProblem
from .lp_problem import StandardLpProblem

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

MAX_RETRIES = 50
BASIS_CONDITION_LIMIT = 1e8


def generate_bilinear(m: int, n: int, rank: int, density: float, seed: int) -> BilinearProblem:
    """
    Random unconstrained bilinear instance with a nonempty optimal set.

    A = U V with sparse Gaussian factors U (m x rank), V (rank x n) whose density is
    chosen so that the product has roughly ``density`` nonzeros. Then b = A x^ and
    c = -A^T y^ for Gaussian (x^, y^), so (x^, y^) lies in Z*.

    Raises:
        ValueError: On invalid shape parameters.
        GenerationError: If full-rank factors cannot be drawn.
    """
    if m < 1 or n < 1 or not 1 <= rank <= min(m, n):
        msg = f"Need m, n >= 1 and 1 <= rank <= min(m, n); got m={m}, n={n}, rank={rank}."
        raise ValueError(msg)
    if not 0.0 < density <= 1.0:
        msg = f"density must lie in (0, 1]; got {density}."
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    factor_density = float(np.sqrt(1.0 - (1.0 - density) ** (1.0 / rank)))

    for attempt in range(MAX_RETRIES):
        left = _sparse_gaussian(rng, m, rank, factor_density)
        right = _sparse_gaussian(rng, rank, n, factor_density)
        if np.linalg.matrix_rank(left.toarray()) == rank and np.linalg.matrix_rank(right.toarray()) == rank:
            break
        logger.debug("Rank-deficient factors on attempt %d, resampling", attempt + 1)
    else:
        msg = f"Could not draw rank-{rank} factors at density {density} after {MAX_RETRIES} attempts."
        raise GenerationError(msg)

    matrix = SparseMatrixDual.from_scipy(left @ right)
    x_hat = rng.standard_normal(n)
    y_hat = rng.standard_normal(m)
    b = matrix.matvec(x_hat)
    c = -matrix.rmatvec(y_hat)
    norms = compute_norms(matrix, want_sigma_min_plus=min(m, n) <= SIGMA_MIN_SIZE_LIMIT)
    return BilinearProblem(matrix, b, c, norms)


def generate_lp_known_solution(m: int, n: int, seed: int, density: float = 1.0) -> StandardLpProblem:
    """
    Random standard-form LP with a unique, known primal-dual optimum.

    A random basis B of m columns is drawn until A_B is well conditioned. Then
    x*_B ~ U[1, 2], x*_N = 0, y ~ N(0, 1), c = A^T y + s with s_N ~ U[0.1, 1],
    s_B = 0 and b = A x*. Basis nondegeneracy and strict complementarity make the
    optimum unique.

    Raises:
        ValueError: Unless n > m >= 1.
        GenerationError: If no well-conditioned basis is found.
    """
    if not n > m >= 1:
        msg = f"Need n > m >= 1; got m={m}, n={n}."
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    for attempt in range(MAX_RETRIES):
        dense = _sparse_gaussian(rng, m, n, density).toarray()
        basis = np.sort(rng.choice(n, size=m, replace=False))
        if np.linalg.cond(dense[:, basis]) < BASIS_CONDITION_LIMIT:
            break
        logger.debug("Singular basis on attempt %d, resampling", attempt + 1)
    else:
        msg = f"No well-conditioned basis found after {MAX_RETRIES} attempts."
        raise GenerationError(msg)

    matrix = SparseMatrixDual.from_scipy(dense)
    x_basis = rng.uniform(1.0, 2.0, size=m)
    y_dual = rng.standard_normal(m)
    slack = rng.uniform(0.1, 1.0, size=n - m)
    return lp_from_certificate(matrix, basis, x_basis, y_dual, slack)


def lp_from_certificate(
    matrix: SparseMatrixDual,
    basis: npt.ArrayLike,
    x_basis: npt.ArrayLike,
    y_dual: npt.ArrayLike,
    slack: npt.ArrayLike,
) -> StandardLpProblem:
    """
    Builds the LP whose optimum is certified by a basis and a dual solution.

    Args:
        matrix: A (m x n).
        basis: m column indices of the basis.
        x_basis: Positive basic values of x*.
        y_dual: Textbook dual solution (max b^T y s.t. A^T y <= c).
        slack: Positive reduced costs of the nonbasic columns, in column order.

    Returns:
        The LP with ``known_optimum = (x*, -y_dual)``; the saddle multiplier is the
        negated textbook dual because L carries -b^T y.
    """
    basis = np.asarray(basis, dtype=np.int64)
    nonbasic = np.setdiff1d(np.arange(matrix.ncols), basis)

    x_star = np.zeros(matrix.ncols)
    x_star[basis] = np.asarray(x_basis, dtype=np.float64)
    y_dual = np.asarray(y_dual, dtype=np.float64)

    reduced = np.zeros(matrix.ncols)
    reduced[nonbasic] = np.asarray(slack, dtype=np.float64)
    c = matrix.rmatvec(y_dual) + reduced
    b = matrix.matvec(x_star)
    optimum = np.concatenate([x_star, -y_dual])
    return StandardLpProblem(matrix, b, c, known_optimum=optimum)


def counterexample_lp() -> StandardLpProblem:
    """
    min x1 + x2 s.t. x2 <= 1, x >= 0 in saddle form with y >= 0.

    A = (0 1), b = 1, c = (1, 1); the unique saddle point is z* = 0. The problem
    is not globally metrically subregular: along z = (t, 0, 0) the subdifferential
    distance stays 1 while dist(z, Z*) = t.
    """
    matrix = build_matrix([(0, 1, 1.0)], shape=(1, 2))
    return StandardLpProblem(
        matrix,
        b=[1.0],
        c=[1.0, 1.0],
        norms=compute_norms(matrix, want_sigma_min_plus=True),
        known_optimum=np.zeros(3),
        dual_nonneg=True,
    )


def _sparse_gaussian(rng: np.random.Generator, rows: int, cols: int, density: float) -> sparse.csr_matrix:
    return sparse.random(
        rows,
        cols,
        density=density,
        format="csr",
        random_state=rng,
        data_rvs=rng.standard_normal,
    )
