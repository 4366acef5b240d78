__all__ = [
    "DiscreteSampler",
    "MatrixNorms",
    "SparseMatrixDual",
    "build_matrix",
    "build_sampler",
    "compute_norms",
    "read_matrix_market",
    "write_matrix_market",
]

from .discrete_sampler import DiscreteSampler, build_sampler
from .matrix_market import read_matrix_market, write_matrix_market
from .matrix_norms import MatrixNorms, compute_norms
from .sparse_matrix import SparseMatrixDual, build_matrix
