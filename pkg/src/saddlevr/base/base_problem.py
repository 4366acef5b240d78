from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import StructuralError

if TYPE_CHECKING:
    import numpy.typing as npt

    from saddlevr.problems.problem_kind import ProblemKind
    from saddlevr.sparsela import MatrixNorms, SparseMatrixDual


class BaseProblem(ABC):
    """Abstract base class for bilinear saddle-point problems.

    The problem is min_x max_y L(x, y) = y^T A x + c^T x - b^T y + g-terms, with
    iterates stored contiguously as z = (x, y) of length n + m.

    Provides:
    - the monotone operator F and its linear offset
    - the coefficients of the (linear) duality-gap objective
    - the KKT residual used as dist(0, dL(z))
    """

    kind: ProblemKind

    def __init__(
        self,
        matrix: SparseMatrixDual,
        b: npt.ArrayLike,
        c: npt.ArrayLike,
        norms: MatrixNorms,
    ) -> None:
        """Initialize the problem data.

        Args:
            matrix: Constraint/coupling matrix A with shape (m, n)
            b: Vector of length m
            c: Vector of length n
            norms: Cached norms of ``matrix``
        """
        self.matrix = matrix
        self.b = np.asarray(b, dtype=np.float64).copy()
        self.c = np.asarray(c, dtype=np.float64).copy()
        self.norms = norms
        if self.b.shape != (matrix.nrows,) or self.c.shape != (matrix.ncols,):
            msg = f"b must have length {matrix.nrows} and c length {matrix.ncols}."
            raise StructuralError(msg)
        self.b.setflags(write=False)
        self.c.setflags(write=False)

    @property
    def m(self) -> int:
        return self.matrix.nrows

    @property
    def n(self) -> int:
        return self.matrix.ncols

    @property
    def dim(self) -> int:
        return self.m + self.n

    @property
    @abstractmethod
    def linear_offset(self) -> npt.NDArray[np.float64]:
        """Constant part of F, added once per step outside any sampling."""

    @property
    @abstractmethod
    def nonneg_mask(self) -> npt.NDArray[np.bool_]:
        """Coordinates of z restricted to be nonnegative."""

    @abstractmethod
    def prox_step(self, v: npt.NDArray[np.float64], tau: float) -> npt.NDArray[np.float64]:
        """prox of tau * g evaluated at ``v``."""

    @abstractmethod
    def distance_to_optimum(self, z: npt.NDArray[np.float64]) -> float:
        """dist(z, Z*)."""

    @property
    def has_distance(self) -> bool:
        """Whether ``distance_to_optimum`` is defined for this instance."""
        return True

    def split(self, z: npt.NDArray[np.float64]) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        self.check_iterate(z)
        return z[: self.n], z[self.n :]

    def join(self, x: npt.ArrayLike, y: npt.ArrayLike) -> npt.NDArray[np.float64]:
        z = np.concatenate([np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)])
        self.check_iterate(z)
        return z

    def zeros(self) -> npt.NDArray[np.float64]:
        return np.zeros(self.dim)

    def check_iterate(self, z: npt.NDArray[np.float64]) -> None:
        if z.shape != (self.dim,):
            msg = f"Iterate has shape {z.shape}; expected ({self.dim},) = n + m."
            raise StructuralError(msg)

    def matrix_operator(self, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """(A^T y, -A x), the part of F the stochastic oracles estimate."""
        x, y = self.split(z)
        return np.concatenate([self.matrix.rmatvec(y), -self.matrix.matvec(x)])

    def full_operator(self, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """F(z) = (grad_x Phi, -grad_y Phi)."""
        return self.matrix_operator(z) + self.linear_offset

    def gap_linear_coefficients(self, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """
        Coefficients g with L(x, y^) - L(x^, y) = g^T (z^ - z).

        The expression is linear in z^ and vanishes at z^ = z, so g is exact:
        g = (-(A^T y + c), A x - b).
        """
        x, y = self.split(z)
        return np.concatenate([-(self.matrix.rmatvec(y) + self.c), self.matrix.matvec(x) - self.b])

    def lagrangian(self, x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> float:
        """y^T A x + c^T x - b^T y, without indicator terms."""
        return float(y @ self.matrix.matvec(x) + self.c @ x - self.b @ y)

    def subdifferential_residual(self, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """
        Minimum-norm element of dL(z), coordinate by coordinate.

        Free coordinates keep the residual (A^T y + c, -A x + b). A constrained
        coordinate sitting at 0 may absorb a positive residual through the normal
        cone (-inf, 0], leaving only its negative part.
        """
        x, y = self.split(z)
        residual = np.concatenate([self.matrix.rmatvec(y) + self.c, -self.matrix.matvec(x) + self.b])
        at_bound = self.nonneg_mask & (z <= 0.0)
        residual[at_bound] = np.minimum(residual[at_bound], 0.0)
        return residual
