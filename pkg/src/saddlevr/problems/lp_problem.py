from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from saddlevr.base import BaseProblem
from saddlevr.errors import UnsupportedProblemError
from saddlevr.sparsela import compute_norms

from .problem_kind import ProblemKind

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.sparsela import MatrixNorms, SparseMatrixDual


class StandardLpProblem(BaseProblem):
    """
    Standard-form LP min c^T x s.t. A x = b, x >= 0 in saddle form.

    L(x, y) = y^T A x + c^T x - b^T y with g1(x) = c^T x + i{x >= 0} and
    g2(y) = b^T y, so F(z) = (A^T y, -A x) carries no constant term. With
    ``dual_nonneg`` the rows are inequalities A x <= b and y >= 0 is added to g2.
    """

    kind = ProblemKind.LP

    def __init__(
        self,
        matrix: SparseMatrixDual,
        b: npt.ArrayLike,
        c: npt.ArrayLike,
        norms: MatrixNorms | None = None,
        *,
        known_optimum: npt.ArrayLike | None = None,
        hoffman_constant: float | None = None,
        dual_nonneg: bool = False,
    ) -> None:
        super().__init__(matrix, b, c, norms or compute_norms(matrix))
        self.known_optimum = None
        if known_optimum is not None:
            optimum = np.asarray(known_optimum, dtype=np.float64).copy()
            self.check_iterate(optimum)
            optimum.setflags(write=False)
            self.known_optimum = optimum
        # metadata only; never computed
        self.hoffman_constant = hoffman_constant
        self.dual_nonneg = dual_nonneg

        self._offset = np.zeros(self.dim)
        self._offset.setflags(write=False)
        self._mask = np.zeros(self.dim, dtype=bool)
        self._mask[: self.n] = True
        self._mask[self.n :] = dual_nonneg
        self._mask.setflags(write=False)
        self._shift = np.concatenate([self.c, self.b])

    @property
    def linear_offset(self) -> npt.NDArray[np.float64]:
        return self._offset

    @property
    def nonneg_mask(self) -> npt.NDArray[np.bool_]:
        return self._mask

    @property
    def has_distance(self) -> bool:
        return self.known_optimum is not None

    def prox_step(self, v: npt.NDArray[np.float64], tau: float) -> npt.NDArray[np.float64]:
        """(max(v_x - tau c, 0), v_y - tau b), with y clamped too under ``dual_nonneg``."""
        out = v - tau * self._shift
        np.maximum(out, 0.0, out=out, where=self._mask)
        return out

    def distance_to_optimum(self, z: npt.NDArray[np.float64]) -> float:
        """
        ||z - z*|| for instances carrying a certified unique optimum.

        Raises:
            UnsupportedProblemError: If the instance has no known optimum.
        """
        if self.known_optimum is None:
            msg = "LP distance is only defined for instances with a known unique optimum."
            raise UnsupportedProblemError(msg)
        self.check_iterate(z)
        return float(np.linalg.norm(z - self.known_optimum))

    def objective(self, z: npt.NDArray[np.float64]) -> float:
        """Primal objective c^T x."""
        x, _ = self.split(z)
        return float(self.c @ x)
