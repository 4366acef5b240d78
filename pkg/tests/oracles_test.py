from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from saddlevr.errors import InvalidDistributionError, StructuralError
from saddlevr.oracles import (
    CoordinateOracle,
    FullOracle,
    OracleKind,
    RowColumnOracle,
    empirical_lipschitz_check,
    exhaustive_expectation,
    exhaustive_second_moment,
    make_oracle,
    make_problem_oracle,
)
from saddlevr.problems import generate_bilinear
from saddlevr.sparsela import build_matrix

ALL_KINDS = list(OracleKind)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_exhaustive_expectation_is_the_operator(kind, small_bilinear, rng):
    oracle = make_problem_oracle(kind, small_bilinear)
    for _ in range(5):
        z = rng.standard_normal(small_bilinear.dim)
        assert_allclose(exhaustive_expectation(oracle, z), small_bilinear.full_operator(z), rtol=0.0, atol=1e-12 * 10)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_unbiased_on_matrix_with_empty_rows(kind, sparse_matrix, rng):
    padded = build_matrix(sparse_matrix.triplets(), shape=(sparse_matrix.nrows + 1, sparse_matrix.ncols + 1))
    b, c = rng.standard_normal(padded.nrows), rng.standard_normal(padded.ncols)
    oracle = make_oracle(kind, padded, b=b, c=c)
    z = rng.standard_normal(oracle.dim)
    dense = padded.to_dense()
    x, y = z[: oracle.n], z[oracle.n :]
    expected = np.concatenate([dense.T @ y + c, -dense @ x + b])
    assert_allclose(exhaustive_expectation(oracle, z), expected, atol=1e-11)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_second_moment_within_bound(kind, rng):
    for seed in range(3):
        problem = generate_bilinear(4, 5, 3, 0.7, seed=seed)
        oracle = make_problem_oracle(kind, problem)
        worst = empirical_lipschitz_check(oracle, 20, rng)
        assert worst <= oracle.lipschitz_bound**2 * (1.0 + 1e-9)


def test_lipschitz_bounds(sparse_matrix, dense_matrix):
    m, n = dense_matrix.shape
    frobenius = np.linalg.norm(dense_matrix)

    uniform = make_oracle(OracleKind.UNIFORM_RC, sparse_matrix)
    importance = make_oracle(OracleKind.IMPORTANCE_RC, sparse_matrix)
    coord_l1 = make_oracle(OracleKind.COORD_L1, sparse_matrix)
    coord_fro = make_oracle(OracleKind.COORD_FRO, sparse_matrix)
    full = make_oracle(OracleKind.FULL, sparse_matrix)

    row_sq = np.sum(dense_matrix**2, axis=1)
    col_sq = np.sum(dense_matrix**2, axis=0)
    assert uniform.lipschitz_bound == pytest.approx(np.sqrt(max(m * row_sq.max(), n * col_sq.max())))
    assert importance.lipschitz_bound == pytest.approx(frobenius)
    row_l1 = np.abs(dense_matrix).sum(axis=1)
    col_l1 = np.abs(dense_matrix).sum(axis=0)
    assert coord_l1.lipschitz_bound == pytest.approx(max(np.linalg.norm(row_l1), np.linalg.norm(col_l1)))
    longest = max(np.count_nonzero(dense_matrix, axis=1).max(), np.count_nonzero(dense_matrix, axis=0).max())
    assert coord_fro.lipschitz_bound == pytest.approx(frobenius * np.sqrt(longest))
    assert full.lipschitz_bound == pytest.approx(np.linalg.norm(dense_matrix, 2))


def test_coord_fro_bound_is_tight_for_a_dense_row():
    # one row with two entries: E|F_xi(z)|^2 reaches |A|_F^2 * 2 * y^2
    matrix = build_matrix([(0, 0, 1.0), (0, 1, 1.0)], shape=(1, 2))
    oracle = make_oracle(OracleKind.COORD_FRO, matrix)
    u = np.array([0.0, 0.0, 1.0])
    moment = exhaustive_second_moment(oracle, u, np.zeros(3))
    assert moment == pytest.approx(4.0)
    assert moment <= oracle.lipschitz_bound**2 * (1.0 + 1e-12)


def test_importance_second_moment_equals_frobenius_bound(sparse_matrix, dense_matrix, rng):
    oracle = make_oracle(OracleKind.IMPORTANCE_RC, sparse_matrix)
    u = rng.standard_normal(oracle.dim)
    moment = exhaustive_second_moment(oracle, u, np.zeros_like(u))
    assert moment == pytest.approx(np.linalg.norm(dense_matrix) ** 2 * np.sum(u**2), rel=1e-12)


def test_factory_types_and_costs(sparse_matrix):
    full = make_oracle("full", sparse_matrix)
    rc = make_oracle("importance_rc", sparse_matrix)
    coord = make_oracle("coord-l1", sparse_matrix)

    assert isinstance(full, FullOracle)
    assert isinstance(rc, RowColumnOracle)
    assert isinstance(coord, CoordinateOracle)
    assert full.call_cost == sparse_matrix.nnz
    assert rc.call_cost == 2
    assert coord.call_cost == 2
    assert full.support_size == 1
    assert rc.support_size == sparse_matrix.nrows * sparse_matrix.ncols


def test_linear_offset_layout(sparse_matrix):
    b = np.arange(sparse_matrix.nrows, dtype=float)
    c = np.arange(sparse_matrix.ncols, dtype=float) + 10.0
    oracle = make_oracle(OracleKind.UNIFORM_RC, sparse_matrix, b=b, c=c)
    assert_allclose(oracle.linear_offset, np.concatenate([c, b]))


def test_coordinate_estimate_touches_two_coordinates(sparse_matrix, rng):
    oracle = make_oracle(OracleKind.COORD_FRO, sparse_matrix)
    z = rng.standard_normal(oracle.dim)
    sample = oracle.sample_gradient(z, rng)

    assert sample.nnz == 2
    assert sample.work == 2
    assert sample.coords[0] < oracle.n <= sample.coords[1]


def test_row_column_draws_are_in_range(sparse_matrix, rng):
    oracle = make_oracle(OracleKind.UNIFORM_RC, sparse_matrix)
    for _ in range(50):
        i, j = oracle.draw(rng)
        assert 0 <= i < oracle.m
        assert 0 <= j < oracle.n


def test_full_oracle_estimate_is_dense(sparse_matrix, dense_matrix, rng):
    oracle = make_oracle(OracleKind.FULL, sparse_matrix)
    z = rng.standard_normal(oracle.dim)
    sample = oracle.estimate(oracle.draw(rng), z)
    x, y = z[: oracle.n], z[oracle.n :]
    assert sample.is_dense
    assert_allclose(sample.dense, np.concatenate([dense_matrix.T @ y, -dense_matrix @ x]))


@pytest.mark.parametrize("kind", [OracleKind.COORD_L1, OracleKind.COORD_FRO])
def test_coordinate_oracles_need_nonzeros(kind):
    with pytest.raises(InvalidDistributionError):
        make_oracle(kind, build_matrix([], shape=(2, 3)))


@pytest.mark.parametrize("kind", [OracleKind.UNIFORM_RC, OracleKind.IMPORTANCE_RC])
def test_row_column_oracles_accept_a_zero_matrix(kind, rng):
    b, c = np.array([1.0, -2.0]), np.array([0.5, 0.0, 3.0])
    oracle = make_oracle(kind, build_matrix([], shape=(2, 3)), b=b, c=c)
    z = rng.standard_normal(oracle.dim)

    assert oracle.lipschitz_bound == 0.0
    assert_allclose(exhaustive_expectation(oracle, z), np.concatenate([c, b]))
    assert_allclose(oracle.sample_gradient(z, rng).to_dense(oracle.dim), 0.0)


def test_oracle_problem_mismatch(small_bilinear, tiny_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    oracle.check_problem(small_bilinear)
    with pytest.raises(StructuralError):
        oracle.check_problem(tiny_bilinear)


def test_parse_accepts_underscores():
    assert OracleKind.parse("coord_fro") is OracleKind.COORD_FRO
    assert OracleKind.parse(" Importance-RC ") is OracleKind.IMPORTANCE_RC
    assert OracleKind.COORD_L1.is_coordinate
    assert OracleKind.UNIFORM_RC.is_row_column
    with pytest.raises(ValueError):
        OracleKind.parse("svrg")


@pytest.mark.slow
@pytest.mark.parametrize("kind", [OracleKind.UNIFORM_RC, OracleKind.COORD_L1])
def test_sample_mean_converges(kind, small_bilinear, rng):
    oracle = make_problem_oracle(kind, small_bilinear)
    z = rng.standard_normal(small_bilinear.dim)
    draws = 20_000
    total = np.zeros(oracle.dim)
    for _ in range(draws):
        oracle.sample_gradient(z, rng).add_to(total)
    mean = total / draws + oracle.linear_offset
    spread = oracle.lipschitz_bound * np.linalg.norm(z) / np.sqrt(draws)
    assert np.linalg.norm(mean - small_bilinear.full_operator(z)) <= 6.0 * spread
