from __future__ import annotations

import argparse
from typing import Any

from .verify_suites import SUITES, run_suites


def add_parser(subparsers: Any) -> None:
    parser = subparsers.add_parser("verify", help="Run the property suites and report pass/fail per suite.")
    parser.add_argument(
        "--suite",
        action="append",
        choices=sorted(SUITES),
        help="Run only this suite; repeatable. All suites by default.",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--inject-bias", dest="inject_bias", type=float, default=1.0, help=argparse.SUPPRESS)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    names = args.suite or list(SUITES)
    results = run_suites(names, args.seed, args.inject_bias)
    for result in results:
        print(result.summary())
    return 0 if all(result.passed for result in results) else 1
