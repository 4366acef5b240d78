from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.errors import StructuralError

if TYPE_CHECKING:
    from collections.abc import Iterator

    import numpy.typing as npt

    from saddlevr.base.base_problem import BaseProblem
    from saddlevr.oracles.oracle_kind import OracleKind
    from saddlevr.oracles.oracle_sample import OracleSample
    from saddlevr.sparsela import SparseMatrixDual


class BaseOracle(ABC):
    """Abstract base class for unbiased estimators of F(z) = (A^T y, -A x) + offset.

    A draw and an evaluation are separate steps, so one realized index can be
    evaluated at two points (the variance-reduced difference needs this).
    The deterministic ``linear_offset`` is never part of a sample.
    """

    kind: OracleKind
    # random draws consumed per call to ``draw``
    draws_per_step: int = 2

    def __init__(
        self,
        matrix: SparseMatrixDual,
        linear_offset: npt.NDArray[np.float64],
        lipschitz_bound: float,
    ) -> None:
        """Initialize shared oracle state.

        Args:
            matrix: The coupling matrix A (m x n)
            linear_offset: Constant part of F, length n + m
            lipschitz_bound: Mean-square Lipschitz constant L of the estimator
        """
        self.matrix = matrix
        self.linear_offset = np.asarray(linear_offset, dtype=np.float64)
        self.linear_offset.setflags(write=False)
        self.lipschitz_bound = float(lipschitz_bound)

    @property
    def n(self) -> int:
        return self.matrix.ncols

    @property
    def m(self) -> int:
        return self.matrix.nrows

    @property
    def dim(self) -> int:
        return self.n + self.m

    @abstractmethod
    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        """Realizes the random index xi."""

    @abstractmethod
    def estimate(self, xi: tuple[int, ...], z: npt.NDArray[np.float64]) -> OracleSample:
        """F_xi(z) without the linear offset."""

    @abstractmethod
    def outcomes(self) -> Iterator[tuple[float, tuple[int, ...]]]:
        """Every (probability, xi) pair with positive probability."""

    @property
    @abstractmethod
    def support_size(self) -> int:
        """Number of outcomes yielded by ``outcomes``."""

    @property
    def call_cost(self) -> int:
        """Oracle calls charged per iteration."""
        return self.draws_per_step

    def check_problem(self, problem: BaseProblem) -> None:
        """
        Raises:
            StructuralError: If the matrix shape or linear offset differs from the
                problem's.
        """
        if self.matrix.shape != problem.matrix.shape or not np.array_equal(self.linear_offset, problem.linear_offset):
            msg = "Oracle was not built for this problem (matrix shape or linear offset differ)."
            raise StructuralError(msg)

    def sample_gradient(self, z: npt.NDArray[np.float64], rng: np.random.Generator) -> OracleSample:
        return self.estimate(self.draw(rng), z)

    def matrix_operator(self, z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        x, y = z[: self.n], z[self.n :]
        return np.concatenate([self.matrix.rmatvec(y), -self.matrix.matvec(x)])
