from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from saddlevr.errors import UnsupportedProblemError
from saddlevr.oracles import OracleKind, make_problem_oracle
from saddlevr.problems import generate_bilinear
from saddlevr.solvers import (
    LazyIterateState,
    SolverConfig,
    lazy_segm_run,
    materialize,
    resolve_config,
    rsegm_run,
    segm_run,
)
from saddlevr.solvers.lazy_engine import FLUSH_THRESHOLD


def test_advance_matches_the_dense_half_step(small_bilinear, rng):
    p, tau = 0.2, 0.05
    z0 = rng.standard_normal(small_bilinear.dim)
    state = LazyIterateState(small_bilinear, p, tau, z0)
    fw = small_bilinear.full_operator(z0)

    state.advance()
    expected = (1.0 - p) * z0 + p * z0 - tau * fw
    assert_allclose(materialize(state), expected, rtol=1e-13, atol=1e-13)
    assert_allclose(state.half_sum(), expected, rtol=1e-13, atol=1e-13)

    state.advance()
    twice = (1.0 - p) * expected + p * z0 - tau * fw
    assert_allclose(state.materialize(), twice, rtol=1e-13, atol=1e-13)
    assert_allclose(state.average(), (expected + twice) / 2.0, rtol=1e-13, atol=1e-13)


def test_corrections_enter_later_half_iterates_only(small_bilinear, rng):
    p, tau = 0.3, 0.1
    z0 = rng.standard_normal(small_bilinear.dim)
    state = LazyIterateState(small_bilinear, p, tau, z0)
    fw = small_bilinear.full_operator(z0)
    u = p * z0 - tau * fw

    state.advance()
    first = state.materialize()
    state.correct(0, 1.5)
    current = first.copy()
    current[0] += 1.5
    assert_allclose(state.materialize(), current, rtol=1e-13, atol=1e-13)

    state.advance()
    second = (1.0 - p) * current + u
    assert_allclose(state.materialize(), second, rtol=1e-13, atol=1e-13)
    assert_allclose(state.half_sum(), first + second, rtol=1e-12, atol=1e-12)


def test_refresh_takes_a_new_snapshot(small_bilinear, rng):
    state = LazyIterateState(small_bilinear, 0.1, 0.05, rng.standard_normal(small_bilinear.dim))
    for coord in range(3):
        state.advance()
        state.correct(coord, 0.25)
    z = state.materialize()
    sums = state.half_sum()

    fw = state.refresh()
    assert_allclose(state.snapshot, z)
    assert_allclose(fw, small_bilinear.full_operator(z))
    assert_allclose(state.materialize(), z)
    assert_allclose(state.half_sum(), sums, rtol=1e-12)
    assert state.scale == 1.0
    assert state.refreshes == 2


def test_flush_preserves_the_iterate():
    problem = generate_bilinear(3, 4, 2, 1.0, seed=1)
    state = LazyIterateState(problem, 0.9, 0.01, np.ones(problem.dim))
    steps = 0
    while state.flushes == 0:
        before = state.materialize()
        state.advance()
        steps += 1
        assert state.scale >= FLUSH_THRESHOLD
        assert np.all(np.isfinite(state.materialize()))
    assert steps > 100
    assert state.scale > FLUSH_THRESHOLD
    expected = 0.1 * before + state.u
    assert_allclose(state.materialize(), expected, rtol=1e-12, atol=1e-12)


def test_rebased_copy_is_equivalent(small_bilinear, rng):
    state = LazyIterateState(small_bilinear, 0.2, 0.05, rng.standard_normal(small_bilinear.dim))
    for coord in (0, 4, 7):
        state.advance()
        state.correct(coord, -0.5)
    twin = state.rebased()

    assert_allclose(twin.materialize(), state.materialize(), rtol=1e-13, atol=1e-13)
    assert_allclose(twin.half_sum(), state.half_sum(), rtol=1e-13, atol=1e-13)
    twin.advance()
    state.advance()
    assert_allclose(twin.materialize(), state.materialize(), rtol=1e-12, atol=1e-12)
    assert_allclose(twin.half_sum(), state.half_sum(), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("kind", [OracleKind.COORD_FRO, OracleKind.COORD_L1])
def test_lazy_epoch_matches_dense_epoch(kind, small_bilinear, rng):
    oracle = make_problem_oracle(kind, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(p=0.1, inner_iters=300, restarts=1, record_every=50))
    z0 = rng.standard_normal(small_bilinear.dim)

    dense_z, dense_trace = segm_run(small_bilinear, oracle, config, z0, np.random.default_rng(5))
    lazy_z, lazy_trace = lazy_segm_run(small_bilinear, oracle, replace(config, lazy=True), z0, np.random.default_rng(5))

    assert_allclose(lazy_z, dense_z, rtol=1e-9, atol=1e-12)
    assert lazy_trace.oracle_calls == dense_trace.oracle_calls
    assert len(lazy_trace.records) == len(dense_trace.records)
    for lazy_record, dense_record in zip(lazy_trace.records, dense_trace.records):
        assert lazy_record.distance == pytest.approx(dense_record.distance, rel=1e-9, abs=1e-12)


@pytest.mark.slow
def test_lazy_restarted_run_matches_dense(small_bilinear):
    oracle = make_problem_oracle(OracleKind.COORD_FRO, small_bilinear)
    for seed in range(5):
        config = resolve_config(small_bilinear, oracle, SolverConfig(p=0.02, inner_iters=500, restarts=3, seed=seed))
        z0 = small_bilinear.zeros()
        dense_z, _ = rsegm_run(small_bilinear, oracle, config, z0)
        lazy_z, _ = rsegm_run(small_bilinear, oracle, replace(config, lazy=True), z0)
        assert_allclose(lazy_z, dense_z, rtol=1e-9, atol=1e-12)


@pytest.fixture(scope="module")
def coordinate_instance():
    return generate_bilinear(50, 60, 10, 0.3, seed=17)


def _reference_epoch(problem, oracle, p, tau, iters, z0, rng, record_every):
    """sEGM with F from the dense matrix and the sampled entries read off it."""
    a = problem.matrix.to_dense()
    n = problem.n

    def operator(z):
        return np.concatenate([a.T @ z[n:] + problem.c, -a @ z[:n] + problem.b])

    rows, cols = oracle.entry_rows, oracle.entry_cols
    z = z0.copy()
    w, fw = z, operator(z)
    half_sum = np.zeros_like(z)
    inner = []
    for k in range(1, iters + 1):
        kx, ky = oracle.draw(rng)
        z_half = (1.0 - p) * z + p * w - tau * fw
        direction = fw.copy()
        i, j = rows[kx], cols[kx]
        direction[j] += a[i, j] / oracle.p[kx] * (z_half[n + i] - w[n + i])
        i, j = rows[ky], cols[ky]
        direction[n + i] -= a[i, j] / oracle.q[ky] * (z_half[j] - w[j])
        z = (1.0 - p) * z + p * w - tau * direction
        half_sum += z_half
        if rng.random() < p:
            w, fw = z, operator(z)
        if k % record_every == 0 and k < iters:
            inner.append(z)
    return half_sum / iters, inner


@pytest.mark.slow
def test_lazy_matches_dense_over_many_seeds(coordinate_instance):
    problem = coordinate_instance
    oracle = make_problem_oracle(OracleKind.COORD_FRO, problem)
    z0 = problem.zeros()
    for seed in range(100):
        config = resolve_config(problem, oracle, SolverConfig(inner_iters=10_000, restarts=1, record_every=1_000, seed=seed))
        dense_z, dense_trace = segm_run(problem, oracle, config, z0)
        lazy_z, lazy_trace = lazy_segm_run(problem, oracle, replace(config, lazy=True), z0)

        assert_allclose(lazy_z, dense_z, rtol=1e-9, atol=1e-12)
        assert [r.step for r in lazy_trace.records] == [r.step for r in dense_trace.records]
        for lazy_record, dense_record in zip(lazy_trace.records, dense_trace.records):
            assert lazy_record.distance == pytest.approx(dense_record.distance, rel=1e-9, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(3))
def test_lazy_matches_a_dense_numpy_reference(seed, coordinate_instance):
    problem = coordinate_instance
    oracle = make_problem_oracle(OracleKind.COORD_FRO, problem)
    # p large enough for a few snapshot refreshes within the epoch
    config = resolve_config(problem, oracle, SolverConfig(p=1e-3, inner_iters=10_000, restarts=1, record_every=1_000, seed=seed))
    z0 = np.random.default_rng(seed).standard_normal(problem.dim)

    expected, inner = _reference_epoch(problem, oracle, config.p, config.tau, 10_000, z0, np.random.default_rng(seed), 1_000)
    lazy_z, lazy_trace = lazy_segm_run(problem, oracle, replace(config, lazy=True), z0)

    assert_allclose(lazy_z, expected, rtol=1e-9, atol=1e-12)
    inner_distances = [r.distance for r in lazy_trace.records if not r.restart]
    assert len(inner_distances) == len(inner) == 9
    for measured, z in zip(inner_distances, inner):
        assert measured == pytest.approx(problem.distance_to_optimum(z), rel=1e-9, abs=1e-12)


def _lazy_seconds_per_step(problem, short=2_000, long=20_000):
    oracle = make_problem_oracle(OracleKind.COORD_FRO, problem)
    z0 = problem.zeros()
    best = {}
    for steps in (short, long):
        # no snapshot refresh, so only the O(1) step is timed
        config = resolve_config(problem, oracle, SolverConfig(p=1e-12, inner_iters=steps, restarts=1, lazy=True))
        best[steps] = math.inf
        for _ in range(3):
            start = time.perf_counter()
            lazy_segm_run(problem, oracle, config, z0, np.random.default_rng(0))
            best[steps] = min(best[steps], time.perf_counter() - start)
    return (best[long] - best[short]) / (long - short)


@pytest.mark.slow
def test_lazy_step_cost_does_not_grow_with_dimension(coordinate_instance):
    large = generate_bilinear(500, 600, 10, 0.02, seed=17)
    small_cost = _lazy_seconds_per_step(coordinate_instance)
    large_cost = _lazy_seconds_per_step(large)
    assert small_cost > 0.0
    assert large_cost <= 2.0 * small_cost


def test_lazy_engine_rejects_lp(small_lp):
    oracle = make_problem_oracle(OracleKind.COORD_FRO, small_lp)
    config = resolve_config(small_lp, oracle, SolverConfig(p=0.1, inner_iters=10, restarts=1, lazy=True))
    with pytest.raises(UnsupportedProblemError):
        rsegm_run(small_lp, oracle, config, small_lp.zeros())


def test_lazy_engine_rejects_row_column_oracle(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(p=0.1, inner_iters=10, restarts=1, lazy=True))
    with pytest.raises(UnsupportedProblemError):
        lazy_segm_run(small_bilinear, oracle, config, small_bilinear.zeros())
