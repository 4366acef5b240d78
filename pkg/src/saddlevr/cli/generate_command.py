from __future__ import annotations

import argparse
from typing import TYPE_CHECKING, Any

from saddlevr.problems import ProblemKind, counterexample_lp, generate_bilinear, generate_lp_known_solution, save_problem

from .run_options import format_float

if TYPE_CHECKING:
    from saddlevr.base import BaseProblem

GENERATOR_KINDS = ("bilinear", "lp", "counterexample")


def add_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("generate", help="Write a random or fixed problem instance.")
    parser.add_argument("--kind", choices=GENERATOR_KINDS, default="bilinear")
    parser.add_argument("--m", type=int, default=20, help="Rows of A.")
    parser.add_argument("--n", type=int, default=30, help="Columns of A.")
    parser.add_argument("--rank", type=int, default=5, help="Rank of A (bilinear only).")
    parser.add_argument("--density", type=float, default=1.0, help="Target fraction of nonzeros.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="problem.json", help="Problem JSON path; the .mtx goes next to it.")
    parser.add_argument("--inline", action="store_true", help="Embed the matrix triplets in the JSON.")
    parser.set_defaults(handler=run)


def build_problem(args: argparse.Namespace) -> tuple[BaseProblem, dict[str, Any]]:
    if args.kind == "counterexample":
        return counterexample_lp(), {"kind": "counterexample"}
    if args.kind == "lp":
        params = {"kind": "lp", "m": args.m, "n": args.n, "density": args.density, "seed": args.seed}
        return generate_lp_known_solution(args.m, args.n, args.seed, args.density), params
    params = {"kind": "bilinear", "m": args.m, "n": args.n, "rank": args.rank, "density": args.density, "seed": args.seed}
    return generate_bilinear(args.m, args.n, args.rank, args.density, args.seed), params


def summarize(problem: BaseProblem) -> str:
    sigma = problem.norms.sigma_min_plus
    line = (
        f"kind={problem.kind.value} m={problem.m} n={problem.n} nnz={problem.matrix.nnz} "
        f"frobenius={problem.norms.frobenius:.6e} sigma_min_plus={format_float(sigma)}"
    )
    if problem.kind is ProblemKind.LP:
        line += f" known_optimum={'yes' if problem.has_distance else 'no'}"
    return line


def run(args: argparse.Namespace) -> int:
    problem, params = build_problem(args)
    path = save_problem(problem, args.out, inline=args.inline, extra={"generator": params})
    print(summarize(problem))
    print(f"wrote {path}")
    return 0
