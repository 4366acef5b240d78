from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from saddlevr.base import BaseOracle
from saddlevr.diagnostics import (
    GapQuery,
    boundedness_probe,
    gap_bound_probe,
    random_descent_checks,
    sampled_duality_gap,
    solve_gap,
    subdifferential_distance,
)
from saddlevr.oracles import OracleKind, exhaustive_expectation, exhaustive_second_moment, make_problem_oracle
from saddlevr.problems import counterexample_lp, generate_bilinear, generate_lp_known_solution
from saddlevr.solvers import SolverConfig, resolve_config, rsegm_run

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator

    import numpy.typing as npt

    from saddlevr.oracles import OracleSample
    from saddlevr.problems import BilinearProblem

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def expect(self, condition: bool, message: str) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(message)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{self.name}: {status} ({self.checks - len(self.failures)}/{self.checks} checks)"
        if self.failures:
            line += f"; first failure: {self.failures[0]}"
        return line


class BiasedOracle(BaseOracle):
    """Wraps an oracle and scales every sample; a mutation hook for the unbiasedness suite."""

    def __init__(self, inner: BaseOracle, factor: float) -> None:
        super().__init__(inner.matrix, inner.linear_offset, inner.lipschitz_bound)
        self.inner = inner
        self.factor = factor
        self.kind = inner.kind
        self.draws_per_step = inner.draws_per_step

    def draw(self, rng: np.random.Generator) -> tuple[int, ...]:
        return self.inner.draw(rng)

    def estimate(self, xi: tuple[int, ...], z: npt.NDArray[np.float64]) -> OracleSample:
        sample = self.inner.estimate(xi, z)
        dense = None if sample.dense is None else self.factor * sample.dense
        return replace(sample, values=self.factor * sample.values, dense=dense)

    def outcomes(self) -> Iterator[tuple[float, tuple[int, ...]]]:
        return self.inner.outcomes()

    @property
    def support_size(self) -> int:
        return self.inner.support_size


def _small_bilinear(rng: np.random.Generator, max_size: int = 8) -> BilinearProblem:
    m, n = (int(v) for v in rng.integers(2, max_size + 1, size=2))
    rank = int(rng.integers(1, min(m, n) + 1))
    return generate_bilinear(m, n, rank, float(rng.uniform(0.3, 1.0)), int(rng.integers(2**31)))


def unbiasedness_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """Exhaustive expectation of every oracle kind equals F(z)."""
    result = SuiteResult("unbiasedness")
    for _ in range(10):
        problem = _small_bilinear(rng)
        for kind in OracleKind:
            oracle = make_problem_oracle(kind, problem)
            if bias != 1.0:
                oracle = BiasedOracle(oracle, bias)
            for _ in range(20):
                z = rng.standard_normal(problem.dim)
                exact = problem.full_operator(z)
                got = exhaustive_expectation(oracle, z)
                scale = max(1.0, float(np.max(np.abs(exact))))
                result.expect(
                    bool(np.allclose(got, exact, rtol=0.0, atol=1e-12 * scale)),
                    f"{kind.value} on {problem.m}x{problem.n}: max error {np.max(np.abs(got - exact)):.3e}",
                )
    return result


def lipschitz_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """E|F_xi(u) - F_xi(v)|^2 <= L^2 |u - v|^2 for every kind; importance-rc has L = |A|_F."""
    result = SuiteResult("lipschitz")
    for _ in range(4):
        problem = _small_bilinear(rng)
        for kind in OracleKind:
            oracle = make_problem_oracle(kind, problem)
            bound = oracle.lipschitz_bound**2
            for _ in range(25):
                u = rng.standard_normal(problem.dim)
                v = rng.standard_normal(problem.dim)
                ratio = exhaustive_second_moment(oracle, u, v) / float(np.sum((u - v) ** 2))
                result.expect(ratio <= bound * (1.0 + 1e-9), f"{kind.value}: ratio {ratio:.6e} > L^2 {bound:.6e}")
        importance = make_problem_oracle(OracleKind.IMPORTANCE_RC, problem)
        result.expect(
            math.isclose(importance.lipschitz_bound, problem.norms.frobenius, rel_tol=1e-12),
            "importance-rc bound differs from the Frobenius norm",
        )
    return result


def lazy_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """The lazy coordinate engine reproduces the dense iterates."""
    result = SuiteResult("lazy")
    problem = generate_bilinear(8, 10, 4, 0.5, int(rng.integers(2**31)))
    for kind in (OracleKind.COORD_FRO, OracleKind.COORD_L1):
        oracle = make_problem_oracle(kind, problem)
        for _ in range(3):
            seed = int(rng.integers(2**31))
            base = SolverConfig(p=0.05, inner_iters=400, restarts=3, seed=seed, oracle_kind=kind, record_every=100)
            config = resolve_config(problem, oracle, base)
            z0 = rng.standard_normal(problem.dim)
            dense_z, dense_trace = rsegm_run(problem, oracle, config, z0, np.random.default_rng(seed))
            lazy_z, lazy_trace = rsegm_run(problem, oracle, replace(config, lazy=True), z0, np.random.default_rng(seed))
            result.expect(
                bool(np.allclose(lazy_z, dense_z, rtol=1e-9, atol=1e-12)),
                f"{kind.value} seed {seed}: final iterates differ by {np.max(np.abs(lazy_z - dense_z)):.3e}",
            )
            result.expect(
                lazy_trace.oracle_calls == dense_trace.oracle_calls,
                f"{kind.value} seed {seed}: oracle calls {lazy_trace.oracle_calls} != {dense_trace.oracle_calls}",
            )
    return result


def descent_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """One-step expected potential decrease at random states."""
    result = SuiteResult("descent")
    problem = generate_bilinear(2, 3, 2, 1.0, int(rng.integers(2**31)))
    z_star = problem.optimal_point()
    for kind in (OracleKind.UNIFORM_RC, OracleKind.IMPORTANCE_RC, OracleKind.COORD_FRO):
        oracle = make_problem_oracle(kind, problem)
        for p in (0.1, 0.5):
            tau = math.sqrt(p) / (2.0 * oracle.lipschitz_bound)
            for check in random_descent_checks(problem, oracle, p, tau, z_star, 50, rng):
                result.expect(
                    check.holds(),
                    f"{kind.value} p={p}: phi {check.phi:.6e} -> {check.expected_phi:.6e}, margin {check.margin:.3e}",
                )
    return result


def sharpness_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """rho_r(z) >= sigma_min_plus * dist(z, Z*) and the same for the subdifferential distance."""
    result = SuiteResult("sharpness")
    for _ in range(10):
        problem = _small_bilinear(rng)
        alpha = problem.norms.sigma_min_plus
        if alpha is None:
            continue
        for _ in range(100):
            z = 3.0 * rng.standard_normal(problem.dim)
            dist = problem.distance_to_optimum(z)
            floor = alpha * dist * (1.0 - 1e-8)
            for r in (0.1, 1.0, 10.0):
                rho = solve_gap(problem, GapQuery(z, r)).value
                result.expect(rho >= floor - 1e-12, f"rho_{r} = {rho:.6e} < sigma * dist = {floor:.6e}")
            residual = subdifferential_distance(problem, z)
            result.expect(residual >= floor - 1e-12, f"subdifferential {residual:.6e} < sigma * dist = {floor:.6e}")
    return result


def counterexample_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """The subdifferential-to-distance ratio vanishes along z = (t, 0, 0)."""
    result = SuiteResult("counterexample")
    problem = counterexample_lp()
    ratios = []
    for t in (1.0, 10.0, 1e3, 1e6):
        z = np.array([t, 0.0, 0.0])
        ratios.append(subdifferential_distance(problem, z) / problem.distance_to_optimum(z))
    result.expect(all(a > b for a, b in zip(ratios, ratios[1:])), f"ratios not decreasing: {ratios}")
    result.expect(ratios[-1] <= 1e-5, f"ratio at t=1e6 is {ratios[-1]:.3e}")
    return result


def bisection_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """The LP gap multiplier search agrees with dense sampling of the feasible ball."""
    result = SuiteResult("bisection")
    problem = generate_lp_known_solution(1, 3, int(rng.integers(2**31)))
    for _ in range(20):
        z = rng.standard_normal(problem.dim)
        z[problem.nonneg_mask] = np.abs(z[problem.nonneg_mask])
        r = float(rng.uniform(0.1, 3.0))
        value = solve_gap(problem, GapQuery(z, r)).value
        reference = sampled_duality_gap(problem, z, r, rng)
        result.expect(
            abs(value - reference) <= 1e-4 * max(1.0, abs(reference)),
            f"r={r:.3f}: multiplier search {value:.8e} vs reference {reference:.8e}",
        )
    return result


def probes_suite(rng: np.random.Generator, bias: float = 1.0) -> SuiteResult:
    """Monte-Carlo boundedness and gap bounds along sEGM runs."""
    result = SuiteResult("probes")
    problem = generate_bilinear(2, 3, 2, 1.0, int(rng.integers(2**31)))
    oracle = make_problem_oracle(OracleKind.IMPORTANCE_RC, problem)
    z_star = problem.optimal_point()
    z0 = z_star + rng.standard_normal(problem.dim)
    p = 0.5
    tau = math.sqrt(p) / (2.0 * oracle.lipschitz_bound)

    bounded = boundedness_probe(problem, oracle, p, tau, z0, z_star, steps=20, trials=500, rng=rng)
    result.expect(bounded.holds(), f"half-iterate distance mean {bounded.means.max():.4e} over bound {bounded.bound:.4e}")

    grid = z0 + rng.standard_normal((50, problem.dim))
    gap = gap_bound_probe(problem, oracle, p, tau, z0, z_star, grid, steps=20, trials=500, rng=rng)
    result.expect(gap.holds(), f"gap estimate {gap.mean:.4e} over bound {gap.bound:.4e}")
    return result


SUITES: dict[str, Callable[[np.random.Generator, float], SuiteResult]] = {
    "unbiasedness": unbiasedness_suite,
    "lipschitz": lipschitz_suite,
    "lazy": lazy_suite,
    "descent": descent_suite,
    "sharpness": sharpness_suite,
    "counterexample": counterexample_suite,
    "bisection": bisection_suite,
    "probes": probes_suite,
}


def run_suites(names: list[str], seed: int, bias: float = 1.0) -> list[SuiteResult]:
    """Runs the named suites in registry order, each on its own seeded stream."""
    results = []
    for index, name in enumerate(SUITES):
        if name not in names:
            continue
        rng = np.random.default_rng([seed, index])
        logger.info("Running suite %s", name)
        results.append(SUITES[name](rng, bias))
    return results
