from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import TYPE_CHECKING, Any, TextIO

from saddlevr.errors import SaddleError
from saddlevr.oracles import OracleKind
from saddlevr.problems import load_problem
from saddlevr.solvers import Algorithm, run_algorithm

from .run_options import add_solver_flags, config_from_args, fit_or_none, resolve_run, validate_solver_flags

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from saddlevr.base import BaseProblem

logger = logging.getLogger(__name__)

BENCH_COLUMNS = (
    "algorithm",
    "oracle",
    "oracle_calls_to_tol",
    "work_units_to_tol",
    "total_oracle_calls",
    "final_distance",
    "rate",
    "wall_time",
    "error",
    "config",
)
# relative target when --tol is absent
DEFAULT_RELATIVE_TOL = 1e-6


def add_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("bench", help="Compare algorithms and oracles on one instance.")
    add_solver_flags(parser)
    parser.add_argument("--algos", default="rsegm,det-restart", help="Comma-separated algorithm tags.")
    parser.add_argument("--oracles", default="importance-rc", help="Comma-separated oracle tags for stochastic rows.")
    parser.add_argument("--tol", type=float, help=f"Distance target; defaults to {DEFAULT_RELATIVE_TOL:g} * R0.")
    parser.add_argument("--det-K", dest="det_k", type=int, help="Epoch length of the deterministic rows.")
    parser.add_argument("--out", help="CSV path; stdout when absent.")
    parser.set_defaults(handler=run)


def parse_rows(args: argparse.Namespace) -> list[tuple[Algorithm, OracleKind]]:
    """
    (algorithm, oracle) pairs in flag order; deterministic algorithms get one ``full`` row.

    Raises:
        ValueError: On unknown tags or an empty selection.
    """
    algorithms = [Algorithm(tag.strip()) for tag in args.algos.split(",") if tag.strip()]
    oracles = [OracleKind.parse(tag) for tag in args.oracles.split(",") if tag.strip()]
    rows: list[tuple[Algorithm, OracleKind]] = []
    for algorithm in algorithms:
        kinds = [OracleKind.FULL] if algorithm.is_deterministic else oracles
        rows.extend((algorithm, kind) for kind in kinds if (algorithm, kind) not in rows)
    if not rows:
        msg = "bench needs at least one algorithm and one oracle."
        raise ValueError(msg)
    return rows


def bench_row(
    args: argparse.Namespace,
    problem: BaseProblem,
    algorithm: Algorithm,
    kind: OracleKind,
    z0: npt.NDArray[np.float64],
    tol: float | None,
) -> dict[str, Any]:
    """One CSV row; a failing run fills ``error`` instead of raising."""
    row: dict[str, Any] = dict.fromkeys(BENCH_COLUMNS, "")
    row.update(algorithm=algorithm.value, oracle=kind.value)
    config = config_from_args(args, kind)
    if algorithm.is_deterministic:
        config = replace(config, p=None, tau=None, inner_iters=args.det_k)

    started = time.perf_counter()
    try:
        oracle, config = resolve_run(algorithm, problem, config, z0)
        row["config"] = json.dumps(config.to_dict(), sort_keys=True)
        _, trace = run_algorithm(algorithm, problem, oracle, config, z0)
    except (SaddleError, ValueError) as e:
        logger.warning("Bench row %s/%s failed: %s", algorithm.value, kind.value, e)
        row.update(error=type(e).__name__ + ": " + str(e), wall_time=f"{time.perf_counter() - started:.3f}")
        return row

    reached = None if tol is None else trace.first_reaching(tol)
    fit = fit_or_none(trace.restart_distances())
    row.update(
        oracle_calls_to_tol="" if reached is None else reached.oracle_calls,
        work_units_to_tol="" if reached is None else reached.work_units,
        total_oracle_calls=trace.oracle_calls,
        final_distance="" if trace.final_distance is None else repr(trace.final_distance),
        rate="" if fit is None else repr(fit.rate),
        wall_time=f"{time.perf_counter() - started:.3f}",
    )
    return row


def write_rows(handle: TextIO, rows: list[dict[str, Any]], header: str) -> None:
    handle.write(header + "\n")
    writer = csv.DictWriter(handle, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)


def run(args: argparse.Namespace) -> int:
    validate_solver_flags(args)
    if args.tol is not None and not args.tol > 0.0:
        msg = f"--tol must be positive; got {args.tol}."
        raise ValueError(msg)
    if args.det_k is not None and args.det_k < 1:
        msg = f"--det-K must be >= 1; got {args.det_k}."
        raise ValueError(msg)
    pairs = parse_rows(args)

    problem = load_problem(args.problem)
    z0 = problem.zeros()
    tol = args.tol
    if tol is None and problem.has_distance:
        tol = DEFAULT_RELATIVE_TOL * problem.distance_to_optimum(z0)

    rows = [bench_row(args, problem, algorithm, kind, z0, tol) for algorithm, kind in pairs]
    header = f"# problem={Path(args.problem).name} seed={args.seed} tol={'' if tol is None else repr(tol)}"
    if args.out:
        target = Path(args.out)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", newline="", encoding="utf-8") as handle:
            write_rows(handle, rows, header)
        logger.info("Wrote bench table %s", target)
    else:
        write_rows(sys.stdout, rows, header)
    failed = sum(bool(row["error"]) for row in rows)
    if failed:
        print(f"{failed} of {len(rows)} bench rows failed", file=sys.stderr)
    return 0
