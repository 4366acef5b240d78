from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from saddlevr.errors import InvalidDistributionError, StructuralError, UnsupportedSizeError
from saddlevr.sparsela import (
    SparseMatrixDual,
    build_matrix,
    build_sampler,
    compute_norms,
    read_matrix_market,
    write_matrix_market,
)
from saddlevr.sparsela.matrix_norms import power_iteration


def test_build_matrix_sums_duplicates_and_drops_zeros():
    matrix = build_matrix([(0, 0, 1.0), (0, 0, 2.0), (1, 2, 5.0), (1, 2, -5.0), (1, 1, 4.0)], shape=(2, 3))

    assert matrix.nnz == 2
    assert_array_equal(matrix.to_dense(), [[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]])


def test_build_matrix_infers_shape():
    matrix = build_matrix([(2, 0, 1.0), (0, 4, 1.0)])
    assert matrix.shape == (3, 5)


@pytest.mark.parametrize(
    ("triplets", "shape"),
    [
        ([(0, 3, 1.0)], (2, 3)),
        ([(2, 0, 1.0)], (2, 3)),
        ([(-1, 0, 1.0)], (2, 3)),
        ([], None),
    ],
)
def test_build_matrix_rejects_bad_input(triplets, shape):
    with pytest.raises(StructuralError):
        build_matrix(triplets, shape=shape)


def test_row_and_column_forms_agree(sparse_matrix, dense_matrix):
    for i in range(dense_matrix.shape[0]):
        cols, vals = sparse_matrix.row(i)
        assert_array_equal(dense_matrix[i, cols], vals)
        assert np.count_nonzero(dense_matrix[i]) == cols.size
    for j in range(dense_matrix.shape[1]):
        rows, vals = sparse_matrix.col(j)
        assert_array_equal(dense_matrix[rows, j], vals)
        assert list(rows) == sorted(rows)


def test_entries_are_row_major(sparse_matrix, dense_matrix):
    rows, cols, vals = sparse_matrix.entries()
    order = np.lexsort((cols, rows))
    assert_array_equal(order, np.arange(rows.size))
    assert_array_equal(dense_matrix[rows, cols], vals)


def test_matvec_and_rmatvec(sparse_matrix, dense_matrix, rng):
    x = rng.standard_normal(dense_matrix.shape[1])
    y = rng.standard_normal(dense_matrix.shape[0])
    assert_allclose(sparse_matrix.matvec(x), dense_matrix @ x)
    assert_allclose(sparse_matrix.rmatvec(y), dense_matrix.T @ y)


def test_empty_matrix_products():
    matrix = build_matrix([], shape=(2, 3))
    assert matrix.nnz == 0
    assert_array_equal(matrix.matvec(np.ones(3)), np.zeros(2))
    assert_array_equal(matrix.rmatvec(np.ones(2)), np.zeros(3))


def test_from_scipy_accepts_dense(dense_matrix):
    assert_array_equal(SparseMatrixDual.from_scipy(dense_matrix).to_dense(), dense_matrix)


def test_matrix_market_round_trip(tmp_path, sparse_matrix):
    path = write_matrix_market(tmp_path / "a.mtx", sparse_matrix, comment="test")
    loaded = read_matrix_market(path)
    assert loaded.shape == sparse_matrix.shape
    assert_array_equal(loaded.to_dense(), sparse_matrix.to_dense())


def test_sampler_probabilities_match_weights():
    sampler = build_sampler([0.0, 1.0, 3.0, 0.0, 4.0])

    assert_array_equal(sampler.support, [1, 2, 4])
    assert_allclose(sampler.probabilities, [0.125, 0.375, 0.5])
    assert_allclose(sampler.table_probabilities(), sampler.probabilities)
    assert sampler.probability_of(3) == 0.0
    assert sampler.probability_of(4) == pytest.approx(0.5)


def test_sampler_never_draws_zero_weights(rng):
    sampler = build_sampler([0.0, 2.0, 0.0, 1.0])
    draws = sampler.draw_many(rng, 5000)
    assert set(np.unique(draws)) <= {1, 3}
    assert sampler.draw(rng) in (1, 3)


@pytest.mark.slow
def test_sampler_frequencies(rng):
    weights = np.array([1.0, 2.0, 3.0, 4.0])
    draws = build_sampler(weights).draw_many(rng, 200_000)
    frequencies = np.bincount(draws, minlength=4) / draws.size
    assert_allclose(frequencies, weights / weights.sum(), atol=5e-3)


@pytest.mark.parametrize("weights", [[0.0, 0.0], [], [1.0, -1.0], [1.0, np.inf]])
def test_sampler_rejects_bad_weights(weights):
    with pytest.raises(InvalidDistributionError):
        build_sampler(weights)


def test_norms_against_numpy(sparse_matrix, dense_matrix):
    norms = compute_norms(sparse_matrix, want_sigma_min_plus=True)
    singular = np.linalg.svd(dense_matrix, compute_uv=False)

    assert norms.frobenius == pytest.approx(np.linalg.norm(dense_matrix))
    assert norms.spectral == pytest.approx(singular[0], rel=1e-12)
    assert norms.sigma_min_plus == pytest.approx(singular[singular > 1e-10].min())
    assert_allclose(norms.row_l2, np.linalg.norm(dense_matrix, axis=1))
    assert_allclose(norms.col_l2, np.linalg.norm(dense_matrix, axis=0))
    assert_allclose(norms.row_l1, np.abs(dense_matrix).sum(axis=1))
    assert_allclose(norms.col_l1, np.abs(dense_matrix).sum(axis=0))


def test_sigma_min_plus_skips_zero_singular_values():
    rank_one = np.outer([1.0, 2.0, 3.0], [1.0, -1.0])
    norms = compute_norms(SparseMatrixDual.from_scipy(rank_one), want_sigma_min_plus=True)
    assert norms.sigma_min_plus == pytest.approx(np.linalg.norm(rank_one))


def test_sigma_min_plus_size_limit():
    wide = build_matrix([(0, 0, 1.0)], shape=(2001, 2001))
    with pytest.raises(UnsupportedSizeError):
        compute_norms(wide, want_sigma_min_plus=True)


def test_power_iteration(dense_matrix, sparse_matrix):
    assert power_iteration(sparse_matrix) == pytest.approx(np.linalg.norm(dense_matrix, 2), rel=1e-6)
    assert power_iteration(build_matrix([], shape=(2, 2))) == 0.0
