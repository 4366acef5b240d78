from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from saddlevr.errors import StructuralError

if TYPE_CHECKING:
    from collections.abc import Iterable

    import numpy.typing as npt

Triplet = tuple[int, int, float]


@dataclass(frozen=True)
class SparseMatrixDual:
    """One matrix held in compressed row-major and column-major form at once.

    Both forms are canonical: indices sorted inside every row/column, no
    duplicates and no explicitly stored zeros.
    """

    row_form: sparse.csr_matrix = field(repr=False)
    col_form: sparse.csc_matrix = field(repr=False)

    @property
    def nrows(self) -> int:
        return int(self.row_form.shape[0])

    @property
    def ncols(self) -> int:
        return int(self.row_form.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return int(self.row_form.nnz)

    @classmethod
    def from_scipy(cls, matrix: sparse.spmatrix | sparse.sparray | npt.ArrayLike) -> SparseMatrixDual:
        """Builds both forms from any scipy sparse matrix or dense array."""
        coo = sparse.coo_matrix(matrix, dtype=np.float64)
        return _canonical(coo)

    def row(self, i: int) -> tuple[npt.NDArray[np.int32], npt.NDArray[np.float64]]:
        """Column indices and values of row ``i``."""
        start, stop = self.row_form.indptr[i], self.row_form.indptr[i + 1]
        return self.row_form.indices[start:stop], self.row_form.data[start:stop]

    def col(self, j: int) -> tuple[npt.NDArray[np.int32], npt.NDArray[np.float64]]:
        """Row indices and values of column ``j``."""
        start, stop = self.col_form.indptr[j], self.col_form.indptr[j + 1]
        return self.col_form.indices[start:stop], self.col_form.data[start:stop]

    def entries(self) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.float64]]:
        """Row index, column index and value of every stored entry, in row-major order."""
        rows = np.repeat(np.arange(self.nrows, dtype=np.int64), np.diff(self.row_form.indptr))
        return rows, self.row_form.indices.astype(np.int64), self.row_form.data

    def triplets(self) -> list[Triplet]:
        rows, cols, vals = self.entries()
        return [(int(i), int(j), float(v)) for i, j, v in zip(rows, cols, vals)]

    def matvec(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """A @ x."""
        return self.row_form @ x

    def rmatvec(self, y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """A.T @ y."""
        return self.col_form.T @ y

    def to_dense(self) -> npt.NDArray[np.float64]:
        return self.row_form.toarray()


def build_matrix(
    triplets: Iterable[Triplet],
    shape: tuple[int, int] | None = None,
) -> SparseMatrixDual:
    """
    Builds a SparseMatrixDual from (row, col, value) triplets.

    Duplicate positions are summed and entries that end up zero are dropped.

    Args:
        triplets: Entries with 0-based indices.
        shape: Matrix shape. Inferred from the largest indices when omitted.

    Returns:
        The matrix with consistent row and column forms.

    Raises:
        StructuralError: If an index is negative or falls outside ``shape``, or if
            the shape cannot be inferred from an empty triplet list.
    """
    items = list(triplets)
    rows = np.fromiter((t[0] for t in items), dtype=np.int64, count=len(items))
    cols = np.fromiter((t[1] for t in items), dtype=np.int64, count=len(items))
    vals = np.fromiter((t[2] for t in items), dtype=np.float64, count=len(items))

    if shape is None:
        if not items:
            msg = "Cannot infer the shape of an empty matrix; pass shape explicitly."
            raise StructuralError(msg)
        shape = (int(rows.max()) + 1, int(cols.max()) + 1)

    nrows, ncols = shape
    if nrows < 0 or ncols < 0:
        msg = f"Invalid shape {shape}."
        raise StructuralError(msg)
    if items and (rows.min() < 0 or cols.min() < 0 or rows.max() >= nrows or cols.max() >= ncols):
        msg = f"Triplet index out of range for shape {shape}."
        raise StructuralError(msg)

    return _canonical(sparse.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols)))


def _canonical(coo: sparse.coo_matrix) -> SparseMatrixDual:
    csr = sparse.csr_matrix(coo, dtype=np.float64)
    csr.sum_duplicates()
    csr.eliminate_zeros()
    csr.sort_indices()
    csc = csr.tocsc()
    csc.sort_indices()
    return SparseMatrixDual(row_form=csr, col_form=csc)
