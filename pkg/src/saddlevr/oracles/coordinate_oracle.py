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


class CoordinateOracle(BaseOracle):
    """
    Two independently drawn matrix entries per step, one for each block.

    With (i, j) ~ p and (k, l) ~ q:
    F_xi(z) = (A_ij y_i / p_ij) e_j (x block) and -(A_kl x_l / q_kl) e_k (y block).
    Entries are addressed by their row-major position in the matrix.
    """

    def __init__(
        self,
        kind: OracleKind,
        matrix: SparseMatrixDual,
        linear_offset: npt.NDArray[np.float64],
        lipschitz_bound: float,
        x_weights: npt.NDArray[np.float64],
        y_weights: npt.NDArray[np.float64],
    ) -> None:
        super().__init__(matrix, linear_offset, lipschitz_bound)
        self.kind = kind
        self.entry_rows, self.entry_cols, self.entry_values = matrix.entries()
        self.x_sampler = build_sampler(x_weights)
        self.y_sampler = build_sampler(y_weights)

        p = np.zeros(matrix.nnz)
        p[self.x_sampler.support] = self.x_sampler.probabilities
        q = np.zeros(matrix.nnz)
        q[self.y_sampler.support] = self.y_sampler.probabilities
        self.p = p
        self.q = q
        # per-entry multipliers of y_i (x block) and x_j (y block)
        self.x_coef = np.divide(self.entry_values, p, out=np.zeros_like(p), where=p > 0)
        self.y_coef = -np.divide(self.entry_values, q, out=np.zeros_like(q), where=q > 0)

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        return self.x_sampler.draw(rng), self.y_sampler.draw(rng)

    def estimate(self, xi: tuple[int, ...], z: npt.NDArray[np.float64]) -> OracleSample:
        kx, ky = xi
        n = self.n
        coords = np.array([self.entry_cols[kx], n + self.entry_rows[ky]], dtype=np.int64)
        values = np.array(
            [
                self.x_coef[kx] * z[n + self.entry_rows[kx]],
                self.y_coef[ky] * z[self.entry_cols[ky]],
            ]
        )
        return OracleSample(xi=xi, coords=coords, values=values, work=2)

    def outcomes(self) -> Iterator[tuple[float, tuple[int, ...]]]:
        for kx, px in zip(self.x_sampler.support, self.x_sampler.probabilities):
            for ky, qy in zip(self.y_sampler.support, self.y_sampler.probabilities):
                yield float(px * qy), (int(kx), int(ky))

    @property
    def support_size(self) -> int:
        return self.x_sampler.support_size * self.y_sampler.support_size
