from __future__ import annotations

import argparse
import logging
from typing import TYPE_CHECKING

from saddlevr.diagnostics import fit_linear_rate
from saddlevr.errors import InsufficientDataError
from saddlevr.oracles import OracleKind, make_problem_oracle
from saddlevr.solvers import Algorithm, SolverConfig, resolve_config, resolve_deterministic_config

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from saddlevr.base import BaseOracle, BaseProblem
    from saddlevr.diagnostics import RateFit

logger = logging.getLogger(__name__)

ORACLE_CHOICES = [kind.value for kind in OracleKind]
ALGORITHM_CHOICES = [algorithm.value for algorithm in Algorithm]


def add_solver_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by ``solve`` and ``bench``; each maps to one SolverConfig field."""
    parser.add_argument("--problem", required=True, help="Problem JSON written by `saddlevr generate`.")
    parser.add_argument("--p", type=float, help="Snapshot probability in (0, 1].")
    parser.add_argument("--tau", type=float, help="Step size.")
    parser.add_argument("--inner-K", dest="inner_k", type=int, help="Iterations per epoch.")
    parser.add_argument("--restarts-T", dest="restarts_t", type=int, help="Number of epochs.")
    parser.add_argument("--eps", type=float, help="Target distance; derives T when --restarts-T is absent.")
    parser.add_argument("--multiplier", type=float, default=1.0, help="Scale of the default K.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--record-every", type=int, default=0, help="Inner checkpoint period; 0 records epoch ends only.")
    parser.add_argument("--gap-radius", type=float, help="Also record the normalized duality gap at this radius.")


def validate_solver_flags(args: argparse.Namespace) -> None:
    """
    Raises:
        ValueError: On out-of-range values, before anything is loaded.
    """
    if args.p is not None and not 0.0 < args.p <= 1.0:
        msg = f"--p must lie in (0, 1]; got {args.p}."
        raise ValueError(msg)
    if args.tau is not None and not args.tau > 0.0:
        msg = f"--tau must be positive; got {args.tau}."
        raise ValueError(msg)
    if args.inner_k is not None and args.inner_k < 1:
        msg = f"--inner-K must be >= 1; got {args.inner_k}."
        raise ValueError(msg)
    if args.restarts_t is not None and args.restarts_t < 0:
        msg = f"--restarts-T must be >= 0; got {args.restarts_t}."
        raise ValueError(msg)
    if args.eps is not None and not args.eps > 0.0:
        msg = f"--eps must be positive; got {args.eps}."
        raise ValueError(msg)
    if not args.multiplier > 0.0:
        msg = f"--multiplier must be positive; got {args.multiplier}."
        raise ValueError(msg)
    if args.record_every < 0:
        msg = f"--record-every must be >= 0; got {args.record_every}."
        raise ValueError(msg)
    if args.gap_radius is not None and not args.gap_radius > 0.0:
        msg = f"--gap-radius must be positive; got {args.gap_radius}."
        raise ValueError(msg)


def config_from_args(args: argparse.Namespace, oracle_kind: OracleKind, *, lazy: bool = False) -> SolverConfig:
    return SolverConfig(
        p=args.p,
        tau=args.tau,
        inner_iters=args.inner_k,
        restarts=args.restarts_t,
        seed=args.seed,
        oracle_kind=oracle_kind,
        record_every=args.record_every,
        lazy=lazy,
        multiplier=args.multiplier,
        eps=args.eps,
        gap_radius=args.gap_radius,
    )


def resolve_run(
    algorithm: Algorithm,
    problem: BaseProblem,
    config: SolverConfig,
    z0: npt.NDArray[np.float64],
) -> tuple[BaseOracle | None, SolverConfig]:
    """Builds the oracle (none for the deterministic baselines) and fills every default."""
    if algorithm.is_deterministic:
        return None, resolve_deterministic_config(problem, config, z0)
    oracle = make_problem_oracle(config.oracle_kind, problem)
    return oracle, resolve_config(problem, oracle, config, z0)


def describe_config(algorithm: Algorithm, config: SolverConfig) -> str:
    return (
        f"resolved: algo={algorithm.value} oracle={config.oracle_kind.value} p={config.p:.6g} "
        f"tau={config.tau:.6g} K={config.inner_iters} T={config.restarts} seed={config.seed}"
    )


def fit_or_none(checkpoints: list[tuple[int, float]]) -> RateFit | None:
    try:
        return fit_linear_rate(checkpoints)
    except InsufficientDataError as e:
        logger.info("No rate fitted: %s", e)
        return None


def format_float(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6e}"
