from __future__ import annotations

import numpy as np
import pytest

from saddlevr.problems import BilinearProblem, StandardLpProblem, generate_bilinear, generate_lp_known_solution
from saddlevr.sparsela import SparseMatrixDual, build_matrix


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def dense_matrix() -> np.ndarray:
    return np.array(
        [
            [1.0, 0.0, -2.0, 0.5],
            [0.0, 3.0, 0.0, 0.0],
            [-1.5, 0.0, 0.0, 4.0],
        ]
    )


@pytest.fixture
def sparse_matrix(dense_matrix: np.ndarray) -> SparseMatrixDual:
    rows, cols = np.nonzero(dense_matrix)
    return build_matrix([(int(i), int(j), float(dense_matrix[i, j])) for i, j in zip(rows, cols)], shape=dense_matrix.shape)


@pytest.fixture
def tiny_bilinear() -> BilinearProblem:
    return generate_bilinear(2, 3, 2, 1.0, seed=11)


@pytest.fixture
def small_bilinear() -> BilinearProblem:
    return generate_bilinear(5, 6, 3, 0.8, seed=7)


@pytest.fixture
def small_lp() -> StandardLpProblem:
    return generate_lp_known_solution(3, 6, seed=5)
