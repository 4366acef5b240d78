from __future__ import annotations

from pathlib import Path

from scipy import io, sparse

from .sparse_matrix import SparseMatrixDual


def read_matrix_market(path: str | Path) -> SparseMatrixDual:
    """Reads a Matrix Market coordinate file (1-based indices) into both forms."""
    loaded = io.mmread(str(path))
    return SparseMatrixDual.from_scipy(sparse.coo_matrix(loaded))


def write_matrix_market(path: str | Path, matrix: SparseMatrixDual, comment: str = "") -> Path:
    """Writes ``matrix`` as a real general coordinate Matrix Market file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    io.mmwrite(str(target), matrix.row_form.tocoo(), comment=comment, field="real", precision=17, symmetry="general")
    if target.suffix != ".mtx" and not target.exists():
        return target.with_name(target.name + ".mtx")
    return target
