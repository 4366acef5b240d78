from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse.linalg import lsqr

from saddlevr.base import BaseProblem
from saddlevr.errors import InfeasibleError
from saddlevr.sparsela import compute_norms

from .problem_kind import ProblemKind

if TYPE_CHECKING:
    import numpy.typing as npt
    from scipy import sparse

    from saddlevr.sparsela import MatrixNorms, SparseMatrixDual

LSQ_TOLERANCE = 1e-10
INFEASIBLE_RESIDUAL = 1e-8


class BilinearProblem(BaseProblem):
    """
    Unconstrained bilinear saddle point min_x max_y y^T A x + c^T x - b^T y.

    g is identically zero, so prox is the identity and
    Z* = {(x, y): A x = b, A^T y = -c}, possibly empty.
    """

    kind = ProblemKind.BILINEAR

    def __init__(
        self,
        matrix: SparseMatrixDual,
        b: npt.ArrayLike,
        c: npt.ArrayLike,
        norms: MatrixNorms | None = None,
    ) -> None:
        super().__init__(matrix, b, c, norms or compute_norms(matrix))
        self._offset = np.concatenate([self.c, self.b])
        self._offset.setflags(write=False)
        self._mask = np.zeros(self.dim, dtype=bool)
        self._mask.setflags(write=False)

    @property
    def linear_offset(self) -> npt.NDArray[np.float64]:
        return self._offset

    @property
    def nonneg_mask(self) -> npt.NDArray[np.bool_]:
        return self._mask

    def prox_step(self, v: npt.NDArray[np.float64], tau: float) -> npt.NDArray[np.float64]:
        return np.array(v, dtype=np.float64, copy=True)

    def distance_to_optimum(self, z: npt.NDArray[np.float64]) -> float:
        """
        Euclidean distance to {A x = b} x {A^T y = -c}.

        Each block is corrected by the minimum-norm least-squares solution of the
        residual system, which lies in the row space and is therefore the
        orthogonal projection step.

        Raises:
            InfeasibleError: If either system is inconsistent.
        """
        x, y = self.split(z)
        primal_rhs = self.matrix.matvec(x) - self.b
        dual_rhs = self.matrix.rmatvec(y) + self.c
        dx = _min_norm_correction(self.matrix.row_form, primal_rhs)
        dy = _min_norm_correction(self.matrix.col_form.T, dual_rhs)

        x_proj, y_proj = x - dx, y - dy
        primal_res = np.linalg.norm(self.matrix.matvec(x_proj) - self.b)
        dual_res = np.linalg.norm(self.matrix.rmatvec(y_proj) + self.c)
        if primal_res > INFEASIBLE_RESIDUAL * max(1.0, float(np.linalg.norm(primal_rhs))) or dual_res > (
            INFEASIBLE_RESIDUAL * max(1.0, float(np.linalg.norm(dual_rhs)))
        ):
            msg = f"Optimal set is empty: residuals {primal_res:.3e} (Ax=b), {dual_res:.3e} (A^T y=-c)."
            raise InfeasibleError(msg)
        return float(np.sqrt(dx @ dx + dy @ dy))

    def optimal_point(self, z: npt.NDArray[np.float64] | None = None) -> npt.NDArray[np.float64]:
        """Projection of ``z`` (default 0) onto Z*."""
        z = self.zeros() if z is None else z
        x, y = self.split(z)
        dx = _min_norm_correction(self.matrix.row_form, self.matrix.matvec(x) - self.b)
        dy = _min_norm_correction(self.matrix.col_form.T, self.matrix.rmatvec(y) + self.c)
        return np.concatenate([x - dx, y - dy])


def _min_norm_correction(operator: sparse.spmatrix, rhs: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if operator.shape[1] == 0 or not np.any(rhs):
        return np.zeros(operator.shape[1])
    iter_lim = 20 * max(operator.shape) + 100
    return lsqr(operator, rhs, atol=LSQ_TOLERANCE, btol=LSQ_TOLERANCE, iter_lim=iter_lim)[0]
