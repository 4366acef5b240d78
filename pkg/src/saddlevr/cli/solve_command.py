from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

from saddlevr.diagnostics import run_trials
from saddlevr.errors import DivergenceError
from saddlevr.oracles import OracleKind
from saddlevr.problems import load_problem
from saddlevr.solvers import Algorithm, run_algorithm

from .run_options import (
    ALGORITHM_CHOICES,
    ORACLE_CHOICES,
    add_solver_flags,
    config_from_args,
    describe_config,
    fit_or_none,
    format_float,
    resolve_run,
    validate_solver_flags,
)

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from saddlevr.base import BaseProblem
    from saddlevr.solvers import SolverConfig

logger = logging.getLogger(__name__)


def add_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("solve", help="Run one solver, or an ensemble of seeded trials.")
    add_solver_flags(parser)
    parser.add_argument("--oracle", choices=ORACLE_CHOICES, default=OracleKind.IMPORTANCE_RC.value)
    parser.add_argument("--algo", choices=ALGORITHM_CHOICES, default=Algorithm.RSEGM.value)
    parser.add_argument("--lazy", action="store_true", help="O(1)-per-step engine; coordinate oracles only.")
    parser.add_argument("--trials", type=int, default=1, help="Seeded trials; > 1 writes a quantile CSV.")
    parser.add_argument("--concurrency", type=int, default=4, help="Trials running at once.")
    parser.add_argument("--out", help="JSONL trace path, or CSV summary path when --trials > 1.")
    parser.set_defaults(handler=run)


def validate(args: argparse.Namespace) -> None:
    """
    Raises:
        ValueError: On flag values or combinations that cannot run.
    """
    validate_solver_flags(args)
    algorithm = Algorithm(args.algo)
    if args.trials < 1:
        msg = f"--trials must be >= 1; got {args.trials}."
        raise ValueError(msg)
    if args.concurrency < 1:
        msg = f"--concurrency must be >= 1; got {args.concurrency}."
        raise ValueError(msg)
    if args.lazy and (algorithm.is_deterministic or not OracleKind(args.oracle).is_coordinate):
        msg = "--lazy needs a stochastic algorithm and a coordinate oracle (coord-l1 or coord-fro)."
        raise ValueError(msg)


def run(args: argparse.Namespace) -> int:
    validate(args)
    algorithm = Algorithm(args.algo)
    problem = load_problem(args.problem)
    z0 = problem.zeros()
    config = config_from_args(args, OracleKind(args.oracle), lazy=args.lazy)
    oracle, config = resolve_run(algorithm, problem, config, z0)
    print(describe_config(algorithm, config))

    if args.trials > 1:
        return _run_ensemble(args, algorithm, problem, config, z0)

    try:
        _, trace = run_algorithm(algorithm, problem, oracle, config, z0)
    except DivergenceError as e:
        if args.out and e.trace is not None:
            e.trace.write_jsonl(args.out)
        raise

    if args.out:
        trace.write_jsonl(args.out)
    fit = fit_or_none(trace.restart_distances())
    print(
        f"algo={algorithm.value} final_distance={format_float(trace.final_distance)} "
        f"final_gap={format_float(trace.final_gap)} oracle_calls={trace.oracle_calls} "
        f"rate={format_float(None if fit is None else fit.rate)}"
    )
    return 0


def _run_ensemble(
    args: argparse.Namespace,
    algorithm: Algorithm,
    problem: BaseProblem,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
) -> int:
    ensemble = run_trials(
        problem,
        config.oracle_kind,
        config,
        args.trials,
        args.seed,
        z0=z0,
        algorithm=algorithm,
        concurrency=args.concurrency,
    )
    if args.out:
        ensemble.write_csv(Path(args.out))
    medians = ensemble.median_restart_distances()
    fit = fit_or_none(medians)
    final = medians[-1][1] if medians else None
    print(
        f"algo={algorithm.value} trials={args.trials} ok={ensemble.n_ok} failed={ensemble.n_failed} "
        f"median_final_distance={format_float(final)} rate={format_float(None if fit is None else fit.rate)}"
    )
    return 0 if ensemble.n_failed == 0 else 1
