from __future__ import annotations

from typing import TYPE_CHECKING

from saddlevr.base import BaseOracle

from .oracle_kind import OracleKind
from .oracle_sample import OracleSample

if TYPE_CHECKING:
    from collections.abc import Iterator

    import numpy as np
    import numpy.typing as npt


class FullOracle(BaseOracle):
    """Degenerate oracle returning the exact matrix operator; consumes no randomness."""

    kind = OracleKind.FULL
    draws_per_step = 0

    @property
    def call_cost(self) -> int:
        return self.matrix.nnz

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        return ()

    def estimate(self, xi: tuple[int, ...], z: npt.NDArray[np.float64]) -> OracleSample:
        return OracleSample(xi=xi, dense=self.matrix_operator(z), work=self.matrix.nnz)

    def outcomes(self) -> Iterator[tuple[float, tuple[int, ...]]]:
        yield 1.0, ()

    @property
    def support_size(self) -> int:
        return 1
