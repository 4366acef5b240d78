from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from saddlevr.base import BaseOracle
from saddlevr.sparsela import build_sampler

from .oracle_kind import OracleKind
from .oracle_sample import OracleSample

if TYPE_CHECKING:
    from collections.abc import Iterator

    import numpy.typing as npt

    from saddlevr.sparsela import SparseMatrixDual


class RowColumnOracle(BaseOracle):
    """
    One row and one column per draw, P(xi = (i, j)) = r_i c_j.

    F_xi(z) = ((1 / r_i) A_i. y_i, -(1 / c_j) A_.j x_j). Indices with zero weight
    never get drawn; their contribution to F is zero anyway.
    """

    def __init__(
        self,
        kind: OracleKind,
        matrix: SparseMatrixDual,
        linear_offset: npt.NDArray[np.float64],
        lipschitz_bound: float,
        row_weights: npt.NDArray[np.float64],
        col_weights: npt.NDArray[np.float64],
    ) -> None:
        super().__init__(matrix, linear_offset, lipschitz_bound)
        self.kind = kind
        self.row_sampler = build_sampler(row_weights)
        self.col_sampler = build_sampler(col_weights)
        self.row_probabilities = np.zeros(matrix.nrows)
        self.row_probabilities[self.row_sampler.support] = self.row_sampler.probabilities
        self.col_probabilities = np.zeros(matrix.ncols)
        self.col_probabilities[self.col_sampler.support] = self.col_sampler.probabilities

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        return self.row_sampler.draw(rng), self.col_sampler.draw(rng)

    def estimate(self, xi: tuple[int, ...], z: npt.NDArray[np.float64]) -> OracleSample:
        i, j = xi
        n = self.n
        row_cols, row_vals = self.matrix.row(i)
        col_rows, col_vals = self.matrix.col(j)
        y_i = z[n + i]
        x_j = z[j]
        coords = np.concatenate([row_cols, n + col_rows]).astype(np.int64)
        values = np.concatenate([row_vals * (y_i / self.row_probabilities[i]), col_vals * (-x_j / self.col_probabilities[j])])
        return OracleSample(xi=xi, coords=coords, values=values, work=int(coords.size))

    def outcomes(self) -> Iterator[tuple[float, tuple[int, ...]]]:
        for i, r in zip(self.row_sampler.support, self.row_sampler.probabilities):
            for j, c in zip(self.col_sampler.support, self.col_sampler.probabilities):
                yield float(r * c), (int(i), int(j))

    @property
    def support_size(self) -> int:
        return self.row_sampler.support_size * self.col_sampler.support_size
