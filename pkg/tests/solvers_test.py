from __future__ import annotations

import json
import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from saddlevr.diagnostics import fit_linear_rate, run_trials
from saddlevr.errors import DivergenceError, StructuralError
from saddlevr.oracles import OracleKind, make_problem_oracle
from saddlevr.problems import counterexample_lp, generate_bilinear, generate_lp_known_solution
from saddlevr.solvers import (
    Algorithm,
    SolverConfig,
    default_inner_iters,
    default_probability,
    default_restarts,
    default_step_size,
    deterministic_restarted_egm,
    egm_run,
    resolve_config,
    resolve_deterministic_config,
    rsegm_run,
    run_algorithm,
    segm_norestart_run,
    segm_run,
)
from saddlevr.solvers.solver_config import DEFAULT_RESTARTS


def test_default_probability(sparse_matrix):
    nnz = sparse_matrix.nnz
    # (m + n) / nnz = 7 / 6 clamps to 1
    assert default_probability(OracleKind.IMPORTANCE_RC, sparse_matrix) == 1.0
    assert default_probability(OracleKind.COORD_FRO, sparse_matrix) == pytest.approx(1 / nnz)
    assert default_probability(OracleKind.FULL, sparse_matrix) == 1.0


def test_default_schedule_helpers():
    assert default_step_size(2.0, 0.25) == pytest.approx(0.125)
    assert default_step_size(0.0, 0.5) == 1.0
    assert default_restarts(8.0, 1.0) == 3
    assert default_restarts(1.0, 2.0) == 1
    assert default_inner_iters(4.0, 2.0, 0.25, 3) == 36
    assert default_inner_iters(4.0, 2.0, 0.25, 3, multiplier=0.5) == 18


def test_resolve_config_fills_defaults(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle)

    p = min(1.0, (small_bilinear.m + small_bilinear.n) / small_bilinear.matrix.nnz)
    assert config.is_resolved
    assert config.p == pytest.approx(p)
    assert config.tau == pytest.approx(math.sqrt(p) / (2.0 * small_bilinear.norms.frobenius))
    assert config.restarts == DEFAULT_RESTARTS
    alpha = small_bilinear.norms.sigma_min_plus
    assert config.inner_iters == math.ceil(small_bilinear.norms.frobenius / alpha * DEFAULT_RESTARTS**2 / math.sqrt(p))


def test_resolve_config_derives_restarts_from_eps(small_bilinear):
    oracle = make_problem_oracle(OracleKind.UNIFORM_RC, small_bilinear)
    z0 = small_bilinear.zeros()
    r0 = small_bilinear.distance_to_optimum(z0)
    config = resolve_config(small_bilinear, oracle, SolverConfig(eps=r0 / 100.0, inner_iters=5), z0)
    assert config.restarts == 7
    assert config.inner_iters == 5


def test_resolve_config_keeps_overrides(small_bilinear):
    oracle = make_problem_oracle(OracleKind.COORD_L1, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(seed=4), p=0.5, tau=0.01, inner_iters=3, restarts=2)
    assert (config.p, config.tau, config.inner_iters, config.restarts, config.seed) == (0.5, 0.01, 3, 2, 4)
    assert config.oracle_kind is OracleKind.COORD_L1


def test_lp_needs_explicit_inner_iters(small_lp):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_lp)
    with pytest.raises(ValueError, match="inner_iters"):
        resolve_config(small_lp, oracle)


@pytest.mark.parametrize(
    "overrides",
    [{"p": 0.0}, {"p": 1.5}, {"tau": -1.0}, {"inner_iters": 0}, {"restarts": -1}, {"record_every": -2}],
)
def test_invalid_config_is_rejected(overrides, small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    base = {"p": 0.5, "tau": 0.1, "inner_iters": 5, "restarts": 1}
    with pytest.raises(ValueError):
        resolve_config(small_bilinear, oracle, SolverConfig(**{**base, **overrides}))


def test_unresolved_config_is_rejected(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    with pytest.raises(ValueError):
        segm_run(small_bilinear, oracle, SolverConfig(), small_bilinear.zeros())


def test_full_oracle_with_p_one_is_deterministic_egm(small_bilinear):
    oracle = make_problem_oracle(OracleKind.FULL, small_bilinear)
    stochastic = resolve_config(small_bilinear, oracle, SolverConfig(p=1.0, inner_iters=15, restarts=3))
    deterministic = resolve_deterministic_config(small_bilinear, SolverConfig(inner_iters=15, restarts=3))
    assert stochastic.tau == deterministic.tau

    z0 = small_bilinear.zeros()
    z_rs, trace_rs = rsegm_run(small_bilinear, oracle, stochastic, z0)
    z_det, trace_det = deterministic_restarted_egm(small_bilinear, deterministic, z0)

    assert_array_equal(z_rs, z_det)
    assert [r.distance for r in trace_rs.records] == [r.distance for r in trace_det.records]
    assert [r.oracle_calls for r in trace_rs.records] == [r.oracle_calls for r in trace_det.records]
    assert trace_det.oracle_calls == (3 + 2 * 15 * 3) * small_bilinear.matrix.nnz


def test_rsegm_converges_on_bilinear(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(restarts=6, seed=3))
    z0 = small_bilinear.zeros()
    r0 = small_bilinear.distance_to_optimum(z0)

    z, trace = rsegm_run(small_bilinear, oracle, config, z0)

    assert trace.algorithm == "rsegm"
    assert [epoch for epoch, _ in trace.restart_distances()] == list(range(7))
    assert small_bilinear.distance_to_optimum(z) == pytest.approx(trace.final_distance)
    assert trace.final_distance < 0.05 * r0
    assert_array_equal(trace.final, z)


def test_rsegm_is_reproducible(small_bilinear):
    oracle = make_problem_oracle(OracleKind.UNIFORM_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=50, restarts=2, seed=9))
    first, _ = rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())
    second, _ = rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())
    assert_array_equal(first, second)


def test_zero_restarts_returns_start(small_bilinear, rng):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=5, restarts=0))
    z0 = rng.standard_normal(small_bilinear.dim)
    z, trace = rsegm_run(small_bilinear, oracle, config, z0)
    assert_array_equal(z, z0)
    assert len(trace.records) == 1


def test_inner_checkpoints(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=20, restarts=2, record_every=5))
    _, trace = rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())

    assert [r.step for r in trace.records] == [0, 5, 10, 15, 20, 25, 30, 35, 40]
    assert [r.restart for r in trace.records] == [True, False, False, False, True, False, False, False, True]
    calls = [r.oracle_calls for r in trace.records]
    assert calls == sorted(calls)


def test_segm_norestart_uses_the_same_budget(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=30, restarts=4))
    _, trace = segm_norestart_run(small_bilinear, oracle, config, small_bilinear.zeros())

    assert trace.algorithm == "segm-norestart"
    assert [r.step for r in trace.records] == [0, 120]
    assert trace.config["inner_iters"] == 120


def test_oracle_calls_per_step(small_bilinear):
    oracle = make_problem_oracle(OracleKind.COORD_FRO, small_bilinear)
    # no snapshot refresh within 10 steps at this p
    config = resolve_config(small_bilinear, oracle, SolverConfig(p=1e-12, inner_iters=10, restarts=1))
    _, trace = segm_run(small_bilinear, oracle, config, small_bilinear.zeros())
    assert trace.oracle_calls == small_bilinear.matrix.nnz + 2 * 10
    assert trace.work_units == small_bilinear.matrix.nnz + 4 * 10


def test_det_restart_solves_counterexample():
    problem = counterexample_lp()
    config = resolve_deterministic_config(problem, SolverConfig(inner_iters=20, restarts=10))
    assert config.tau == pytest.approx(0.5)
    z, trace = deterministic_restarted_egm(problem, config, np.array([3.0, 2.0, 1.0]))

    assert trace.algorithm == "det-restart"
    assert np.all(z >= 0.0)
    assert trace.final_distance <= 1e-6


def test_det_egm_returns_last_iterate(small_bilinear):
    config = resolve_deterministic_config(small_bilinear, SolverConfig(inner_iters=10, restarts=3))
    z, trace = egm_run(small_bilinear, config, small_bilinear.zeros())

    assert trace.algorithm == "det-egm"
    assert trace.config["restart_to_average"] is False
    assert small_bilinear.distance_to_optimum(z) == pytest.approx(trace.final_distance)
    assert trace.final_distance < small_bilinear.distance_to_optimum(small_bilinear.zeros())


def test_unit_restart_length_without_averaging_is_egm(small_bilinear):
    base = SolverConfig(restart_to_average=False)
    unit = resolve_deterministic_config(small_bilinear, replace(base, inner_iters=1, restarts=12))
    single = resolve_deterministic_config(small_bilinear, replace(base, inner_iters=12, restarts=1))
    z0 = small_bilinear.zeros()

    z_unit, trace_unit = deterministic_restarted_egm(small_bilinear, unit, z0)
    z_egm, trace_egm = egm_run(small_bilinear, single, z0)

    assert_array_equal(z_unit, z_egm)
    assert trace_unit.final_distance == trace_egm.final_distance


def test_unit_restart_length_with_averaging_takes_projected_steps(small_bilinear, rng):
    config = resolve_deterministic_config(small_bilinear, SolverConfig(inner_iters=1, restarts=6))
    z0 = rng.standard_normal(small_bilinear.dim)
    z, _ = deterministic_restarted_egm(small_bilinear, config, z0)

    expected = z0.copy()
    for _ in range(6):
        expected = small_bilinear.prox_step(expected - config.tau * small_bilinear.full_operator(expected), config.tau)
    assert_allclose(z, expected, rtol=1e-12, atol=1e-12)


def test_deterministic_default_inner_iters(small_bilinear):
    config = resolve_deterministic_config(small_bilinear)
    norms = small_bilinear.norms
    assert config.p == 1.0
    assert config.oracle_kind is OracleKind.FULL
    assert config.inner_iters == math.ceil(8.0 * norms.spectral / norms.sigma_min_plus)


def test_run_algorithm_dispatch(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=5, restarts=1))
    _, trace = run_algorithm("segm-norestart", small_bilinear, oracle, config, small_bilinear.zeros())
    assert trace.algorithm == "segm-norestart"
    assert Algorithm.DET_EGM.is_deterministic
    assert not Algorithm.RSEGM.is_deterministic
    with pytest.raises(ValueError):
        run_algorithm(Algorithm.RSEGM, small_bilinear, None, config, small_bilinear.zeros())


def test_mismatched_oracle_is_rejected(small_bilinear, tiny_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, tiny_bilinear)
    config = resolve_config(tiny_bilinear, oracle, SolverConfig(inner_iters=5, restarts=1))
    with pytest.raises(StructuralError):
        rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())


def test_divergence_carries_partial_trace(small_bilinear):
    oracle = make_problem_oracle(OracleKind.FULL, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(p=1.0, tau=1e6, inner_iters=500, restarts=1))
    with np.errstate(all="ignore"), pytest.raises(DivergenceError) as info:
        rsegm_run(small_bilinear, oracle, config, np.ones(small_bilinear.dim))
    assert info.value.step >= 1
    assert info.value.trace is not None
    assert info.value.trace.records[0].step == 0


def test_trace_jsonl(tmp_path, small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=10, restarts=2, seed=1))
    _, trace = rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())

    path = trace.write_jsonl(tmp_path / "out" / "trace.jsonl")
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert lines[0] == {"type": "config", "algorithm": "rsegm", "seed": 1, "config": config.to_dict()}
    assert [line["type"] for line in lines[1:]] == ["record", "record", "record", "final"]
    assert_allclose(lines[-1]["z"], trace.final)

    first = trace.records[0].distance
    assert trace.first_reaching(first) is trace.records[0]
    assert trace.first_reaching(-1.0) is None


def test_gap_is_recorded_when_requested(small_bilinear):
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, small_bilinear)
    config = resolve_config(small_bilinear, oracle, SolverConfig(inner_iters=10, restarts=1, gap_radius=1.0))
    _, trace = rsegm_run(small_bilinear, oracle, config, small_bilinear.zeros())
    g = small_bilinear.gap_linear_coefficients(small_bilinear.zeros())
    assert trace.records[0].gap == pytest.approx(np.linalg.norm(g))
    assert trace.final_gap is not None


# epoch-length multiplier for the rank-20 instance, fixed once for the runs below
FROZEN_MULTIPLIER = 0.1
TRIALS = 20


@pytest.fixture(scope="module")
def rank_twenty_bilinear():
    return generate_bilinear(100, 100, 20, 1.0, seed=2024)


@pytest.fixture(scope="module")
def rank_twenty_ensembles(rank_twenty_bilinear):
    problem = rank_twenty_bilinear
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, problem)
    config = resolve_config(problem, oracle, SolverConfig(restarts=12, multiplier=FROZEN_MULTIPLIER))
    restarted = run_trials(problem, OracleKind.IMPORTANCE_RC, config, TRIALS, base_seed=0)
    plain = run_trials(problem, OracleKind.IMPORTANCE_RC, config, TRIALS, base_seed=0, algorithm=Algorithm.SEGM_NORESTART)
    return restarted, plain


@pytest.mark.slow
def test_rsegm_median_distance_decays_linearly(rank_twenty_bilinear, rank_twenty_ensembles):
    restarted, _ = rank_twenty_ensembles
    r0 = rank_twenty_bilinear.distance_to_optimum(rank_twenty_bilinear.zeros())
    medians = restarted.median_restart_distances()

    assert restarted.n_ok == TRIALS
    assert [epoch for epoch, _ in medians] == list(range(13))
    # points at the rounding floor carry no rate information
    fit = fit_linear_rate([(epoch, d) for epoch, d in medians if d > 1e-11 * r0])
    assert fit.rate <= 0.56
    assert fit.goodness >= 0.95
    assert medians[-1][1] <= r0 * 2.0**-10


@pytest.mark.slow
def test_restarts_beat_one_long_epoch(rank_twenty_ensembles):
    restarted, plain = rank_twenty_ensembles

    assert plain.n_ok == TRIALS
    assert plain.traces[0].config["inner_iters"] == 12 * restarted.traces[0].config["inner_iters"]
    assert plain.median(restarts_only=True)[-1] >= 10.0 * restarted.median(restarts_only=True)[-1]


@pytest.mark.slow
def test_rsegm_converges_on_lp():
    problem = generate_lp_known_solution(20, 50, seed=3)
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, problem)
    tau = default_step_size(oracle.lipschitz_bound, default_probability(OracleKind.IMPORTANCE_RC, problem.matrix))
    x_star, _ = problem.split(problem.known_optimum)
    sigma_basis = np.linalg.svd(problem.matrix.to_dense()[:, x_star > 0.0], compute_uv=False)[-1]
    z0 = problem.zeros()
    r0 = problem.distance_to_optimum(z0)
    # epoch length from the conditioning of the optimal basis
    config = resolve_config(
        problem,
        oracle,
        SolverConfig(inner_iters=math.ceil(8.0 / (tau * sigma_basis)), restarts=12, gap_radius=r0),
    )

    ensemble = run_trials(problem, OracleKind.IMPORTANCE_RC, config, TRIALS, base_seed=0)
    medians = ensemble.median_restart_distances()

    assert ensemble.n_ok == TRIALS
    assert medians[-1][1] <= 1e-5 * r0
    assert fit_linear_rate(medians).rate <= 0.7
    gaps = np.median([[r.gap for r in trace.records if r.restart] for trace in ensemble.traces], axis=0)
    assert gaps[0] > 0.0
    assert gaps[-1] <= 1e-4 * gaps[0]
