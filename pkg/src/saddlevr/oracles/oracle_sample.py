from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    import numpy.typing as npt


@dataclass(frozen=True)
class OracleSample:
    """One realized stochastic estimate of (A^T y, -A x), without the linear offset.

    Sparse estimates list distinct coordinates of z = (x, y); the ``full`` oracle
    fills ``dense`` instead.
    """

    xi: tuple[int, ...]
    coords: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    values: npt.NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    dense: npt.NDArray[np.float64] | None = None
    work: int = 0

    @property
    def is_dense(self) -> bool:
        return self.dense is not None

    @property
    def nnz(self) -> int:
        return int(self.dense.size if self.dense is not None else self.coords.size)

    def add_to(self, target: npt.NDArray[np.float64], scale: float = 1.0) -> npt.NDArray[np.float64]:
        """target += scale * estimate, in place."""
        if self.dense is not None:
            target += scale * self.dense
        else:
            target[self.coords] += scale * self.values
        return target

    def to_dense(self, dim: int) -> npt.NDArray[np.float64]:
        return self.add_to(np.zeros(dim))
