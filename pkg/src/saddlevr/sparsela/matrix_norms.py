from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy import linalg

from saddlevr.errors import UnsupportedSizeError

if TYPE_CHECKING:
    import numpy.typing as npt

    from .sparse_matrix import SparseMatrixDual

logger = logging.getLogger(__name__)

SIGMA_MIN_SIZE_LIMIT = 2000
# below this size the spectral norm comes from a dense SVD
EXACT_SPECTRAL_LIMIT = 500
SINGULAR_VALUE_THRESHOLD = 1e-10
POWER_ITERATIONS = 200
POWER_TOLERANCE = 1e-8


@dataclass(frozen=True)
class MatrixNorms:
    frobenius: float
    spectral: float
    row_l2: npt.NDArray[np.float64] = field(repr=False)
    col_l2: npt.NDArray[np.float64] = field(repr=False)
    row_l1: npt.NDArray[np.float64] = field(repr=False)
    col_l1: npt.NDArray[np.float64] = field(repr=False)
    sigma_min_plus: float | None = None

    @property
    def max_row_col_l2(self) -> float:
        return float(max(self.row_l2.max(initial=0.0), self.col_l2.max(initial=0.0)))

    @property
    def stable_rank(self) -> float:
        return self.frobenius**2 / self.spectral**2 if self.spectral > 0 else 0.0


def compute_norms(matrix: SparseMatrixDual, *, want_sigma_min_plus: bool = False) -> MatrixNorms:
    """
    Computes the norms used for step sizes, sampling and reports.

    Args:
        matrix: The matrix.
        want_sigma_min_plus: Also compute the smallest nonzero singular value by a
            dense SVD.

    Returns:
        The populated MatrixNorms.

    Raises:
        UnsupportedSizeError: If sigma_min_plus is requested and min(m, n) exceeds
            the dense SVD limit.
    """
    csr, csc = matrix.row_form, matrix.col_form
    row_l2 = np.sqrt(np.asarray(csr.multiply(csr).sum(axis=1)).ravel())
    col_l2 = np.sqrt(np.asarray(csc.multiply(csc).sum(axis=0)).ravel())
    row_l1 = np.asarray(abs(csr).sum(axis=1)).ravel()
    col_l1 = np.asarray(abs(csc).sum(axis=0)).ravel()
    frobenius = float(np.sqrt(np.sum(matrix.row_form.data**2)))

    sigma_min_plus = None
    if want_sigma_min_plus:
        if min(matrix.shape) > SIGMA_MIN_SIZE_LIMIT:
            msg = f"sigma_min_plus needs a dense SVD; min(m, n) must be <= {SIGMA_MIN_SIZE_LIMIT}."
            raise UnsupportedSizeError(msg)
        sigma_min_plus = _sigma_min_plus(matrix)

    if matrix.nnz and max(matrix.shape) <= EXACT_SPECTRAL_LIMIT:
        spectral = float(linalg.svdvals(matrix.to_dense())[0])
    else:
        row_col_max = float(max(row_l2.max(initial=0.0), col_l2.max(initial=0.0)))
        spectral = min(frobenius, max(power_iteration(matrix), row_col_max))

    return MatrixNorms(
        frobenius=frobenius,
        spectral=spectral,
        row_l2=row_l2,
        col_l2=col_l2,
        row_l1=row_l1,
        col_l1=col_l1,
        sigma_min_plus=sigma_min_plus,
    )


def power_iteration(
    matrix: SparseMatrixDual,
    max_iters: int = POWER_ITERATIONS,
    tol: float = POWER_TOLERANCE,
) -> float:
    """Estimates the largest singular value by power iteration on A^T A."""
    if matrix.nnz == 0:
        return 0.0

    v = np.random.default_rng(0).standard_normal(matrix.ncols)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for it in range(max_iters):
        av = matrix.matvec(v)
        new_sigma = float(np.linalg.norm(av))
        w = matrix.rmatvec(av)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return new_sigma
        v = w / norm_w
        if abs(new_sigma - sigma) <= tol * new_sigma:
            logger.debug("Power iteration converged after %d iterations", it + 1)
            return new_sigma
        sigma = new_sigma
    return sigma


def _sigma_min_plus(matrix: SparseMatrixDual) -> float | None:
    if matrix.nnz == 0:
        return None
    values = linalg.svdvals(matrix.to_dense())
    nonzero = values[values > SINGULAR_VALUE_THRESHOLD * values[0]]
    return float(nonzero.min())
