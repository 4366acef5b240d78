from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import InvalidDistributionError
from saddlevr.sparsela import compute_norms

from .coordinate_oracle import CoordinateOracle
from .full_oracle import FullOracle
from .oracle_kind import OracleKind
from .row_column_oracle import RowColumnOracle

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem
    from saddlevr.sparsela import MatrixNorms, SparseMatrixDual

logger = logging.getLogger(__name__)


def make_oracle(
    kind: OracleKind | str,
    matrix: SparseMatrixDual,
    b: npt.ArrayLike | None = None,
    c: npt.ArrayLike | None = None,
    norms: MatrixNorms | None = None,
) -> BaseOracle:
    """
    Builds a stochastic estimator of (A^T y, -A x) with its Lipschitz bound.

    Args:
        kind: Oracle tag, e.g. ``importance-rc``.
        matrix: The coupling matrix A.
        b: Linear term of length m; F_y carries ``+b``.
        c: Linear term of length n.
        norms: Cached norms of ``matrix``; computed when omitted.

    Returns:
        The oracle. Its ``linear_offset`` is (c, b), so F = (A^T y + c, -A x + b);
        omitted terms are zero.

    Raises:
        InvalidDistributionError: For coordinate kinds on a matrix without nonzeros,
            or row/column importance weights that are all zero.
    """
    m, n = matrix.shape
    offset = np.concatenate(
        [
            np.zeros(n) if c is None else np.asarray(c, dtype=np.float64),
            np.zeros(m) if b is None else np.asarray(b, dtype=np.float64),
        ]
    )
    return _build(OracleKind.parse(kind), matrix, offset, norms or compute_norms(matrix))


def make_problem_oracle(kind: OracleKind | str, problem: BaseProblem) -> BaseOracle:
    """Oracle for ``problem``, sharing its norms and linear offset."""
    oracle = _build(OracleKind.parse(kind), problem.matrix, problem.linear_offset, problem.norms)
    logger.debug("Built %s oracle with L=%.6g", oracle.kind.value, oracle.lipschitz_bound)
    return oracle


def _build(
    kind: OracleKind,
    matrix: SparseMatrixDual,
    offset: npt.NDArray[np.float64],
    norms: MatrixNorms,
) -> BaseOracle:
    m, n = matrix.shape

    if kind is OracleKind.FULL:
        return FullOracle(matrix, offset, norms.spectral)

    if kind is OracleKind.UNIFORM_RC:
        bound = float(np.sqrt(max(m * np.max(norms.row_l2, initial=0.0) ** 2, n * np.max(norms.col_l2, initial=0.0) ** 2)))
        return RowColumnOracle(kind, matrix, offset, bound, np.ones(m), np.ones(n))

    if kind is OracleKind.IMPORTANCE_RC:
        if norms.frobenius == 0.0:
            # every estimate is zero, any positive weights are unbiased
            return RowColumnOracle(kind, matrix, offset, 0.0, np.ones(m), np.ones(n))
        return RowColumnOracle(kind, matrix, offset, norms.frobenius, norms.row_l2**2, norms.col_l2**2)

    if matrix.nnz == 0:
        msg = f"Oracle {kind.value} needs a matrix with at least one nonzero entry."
        raise InvalidDistributionError(msg)

    rows, cols, vals = matrix.entries()
    magnitude = np.abs(vals)
    if kind is OracleKind.COORD_L1:
        # p_ij = (|A_i.|_1^2 / sum_k |A_k.|_1^2) * |A_ij| / |A_i.|_1, q analogous on columns
        row_l1, col_l1 = norms.row_l1, norms.col_l1
        x_weights = row_l1[rows] * magnitude
        y_weights = col_l1[cols] * magnitude
        bound = max(float(np.sqrt(np.sum(row_l1**2))), float(np.sqrt(np.sum(col_l1**2))))
        return CoordinateOracle(kind, matrix, offset, bound, x_weights, y_weights)

    # E|F_xi(z)|^2 = |A|_F^2 (sum_i nnz(A_i.) y_i^2 + sum_j nnz(A_.j) x_j^2)
    longest = max(int(np.max(np.diff(matrix.row_form.indptr))), int(np.max(np.diff(matrix.col_form.indptr))))
    squares = vals**2
    return CoordinateOracle(kind, matrix, offset, norms.frobenius * float(np.sqrt(longest)), squares, squares)

