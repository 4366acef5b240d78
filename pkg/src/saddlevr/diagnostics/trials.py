from __future__ import annotations

import asyncio
import csv
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from saddlevr.errors import DivergenceError
from saddlevr.oracles import OracleKind, make_problem_oracle
from saddlevr.solvers import Algorithm, run_algorithm

if TYPE_CHECKING:
    from collections.abc import Sequence

    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem
    from saddlevr.solvers import RunTrace, SolverConfig

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ("checkpoint", "epoch", "median", "q10", "q90", "n_ok", "n_failed")


def derive_seed(base_seed: int, trial_index: int) -> int:
    """Seed of trial ``trial_index``: first word of SeedSequence([base_seed, trial_index])."""
    return int(np.random.SeedSequence([base_seed, trial_index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class TrialOutcome:
    index: int
    seed: int
    trace: RunTrace | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class TrialEnsemble:
    """
    Independent runs of one solver config that differ only in their seeds.

    Quantiles are taken per checkpoint over the successful trials; every trial
    shares the checkpoint grid because K, T and ``record_every`` are fixed.
    """

    base_seed: int
    algorithm: str
    config: dict[str, Any]
    outcomes: list[TrialOutcome] = field(default_factory=list)

    @property
    def traces(self) -> list[RunTrace]:
        return [o.trace for o in self.outcomes if o.ok and o.trace is not None]

    @property
    def n_ok(self) -> int:
        return sum(o.ok for o in self.outcomes)

    @property
    def n_failed(self) -> int:
        return len(self.outcomes) - self.n_ok

    def distance_matrix(self, *, restarts_only: bool = False) -> npt.NDArray[np.float64]:
        """Distances with one row per successful trial and one column per checkpoint; NaN where unmeasured."""
        rows = []
        for trace in self.traces:
            records = [r for r in trace.records if r.restart or not restarts_only]
            rows.append([np.nan if r.distance is None else r.distance for r in records])
        if not rows:
            return np.zeros((0, 0))
        return np.array(rows, dtype=np.float64)

    def quantile(self, q: float, *, restarts_only: bool = False) -> npt.NDArray[np.float64]:
        distances = self.distance_matrix(restarts_only=restarts_only)
        if distances.size == 0:
            return np.zeros(0)
        return np.nanquantile(distances, q, axis=0)

    def median(self, *, restarts_only: bool = False) -> npt.NDArray[np.float64]:
        return self.quantile(0.5, restarts_only=restarts_only)

    def median_restart_distances(self) -> list[tuple[int, float]]:
        """(epoch, median distance) at every epoch boundary."""
        if not self.traces:
            return []
        epochs = [r.epoch for r in self.traces[0].records if r.restart]
        return list(zip(epochs, self.median(restarts_only=True).tolist()))

    def summary_rows(self, quantiles: Sequence[float] = (0.1, 0.9)) -> list[dict[str, Any]]:
        if not self.traces:
            return []
        lower, upper = quantiles
        records = self.traces[0].records
        median, low, high = self.median(), self.quantile(lower), self.quantile(upper)
        return [
            {
                "checkpoint": record.step,
                "epoch": record.epoch,
                "median": median[i],
                "q10": low[i],
                "q90": high[i],
                "n_ok": self.n_ok,
                "n_failed": self.n_failed,
            }
            for i, record in enumerate(records)
        ]

    def write_csv(self, path: str | Path) -> Path:
        """Summary CSV preceded by a comment line holding the resolved config."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", newline="", encoding="utf-8") as handle:
            handle.write(f"# algorithm={self.algorithm} base_seed={self.base_seed} config={json.dumps(self.config, sort_keys=True)}\n")
            writer = csv.DictWriter(handle, fieldnames=SUMMARY_COLUMNS)
            writer.writeheader()
            writer.writerows(self.summary_rows())
        logger.info("Wrote ensemble summary %s", target)
        return target


def _run_one(
    algorithm: Algorithm,
    problem: BaseProblem,
    oracle: BaseOracle | None,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
    index: int,
    base_seed: int,
) -> TrialOutcome:
    seed = derive_seed(base_seed, index)
    trial_config = replace(config, seed=seed)
    try:
        _, trace = run_algorithm(algorithm, problem, oracle, trial_config, z0, np.random.default_rng(seed))
    except DivergenceError as e:
        logger.info("Trial %d (seed %d) diverged at step %d", index, seed, e.step)
        return TrialOutcome(index=index, seed=seed, trace=e.trace, error=str(e))
    return TrialOutcome(index=index, seed=seed, trace=trace)


async def run_trials_async(
    problem: BaseProblem,
    oracle_kind: OracleKind | str,
    config: SolverConfig,
    n_trials: int,
    base_seed: int,
    *,
    z0: npt.NDArray[np.float64] | None = None,
    algorithm: Algorithm | str = Algorithm.RSEGM,
    concurrency: int = 4,
) -> TrialEnsemble:
    """
    Runs ``n_trials`` seeded solver runs, at most ``concurrency`` at a time.

    Each run executes in a worker thread; the problem and the oracle are shared
    read-only and every trial owns its random stream.

    Raises:
        ValueError: If ``n_trials`` < 1.
    """
    if n_trials < 1:
        msg = f"n_trials must be >= 1; got {n_trials}."
        raise ValueError(msg)
    algorithm = Algorithm(algorithm)
    oracle = None if algorithm.is_deterministic else make_problem_oracle(oracle_kind, problem)
    start = problem.zeros() if z0 is None else z0
    semaphore = asyncio.Semaphore(concurrency)

    async def run_with_semaphore(index: int) -> TrialOutcome:
        async with semaphore:
            return await asyncio.to_thread(_run_one, algorithm, problem, oracle, config, start, index, base_seed)

    outcomes = await asyncio.gather(*(run_with_semaphore(i) for i in range(n_trials)))
    ensemble = TrialEnsemble(base_seed=base_seed, algorithm=algorithm.value, config=config.to_dict(), outcomes=list(outcomes))
    logger.info("Ensemble done: %d ok, %d failed", ensemble.n_ok, ensemble.n_failed)
    return ensemble


def run_trials(
    problem: BaseProblem,
    oracle_kind: OracleKind | str,
    config: SolverConfig,
    n_trials: int,
    base_seed: int,
    **kwargs: Any,
) -> TrialEnsemble:
    """Synchronous wrapper around ``run_trials_async``."""
    return asyncio.run(run_trials_async(problem, oracle_kind, config, n_trials, base_seed, **kwargs))
