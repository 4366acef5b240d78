from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import TYPE_CHECKING

from saddlevr.__about__ import __version__
from saddlevr.errors import DivergenceError, SaddleError, StructuralError
from saddlevr.logs import configure_logging

from . import bench_command, generate_command, solve_command, verify_command

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddlevr",
        description="Restarted stochastic extragradient for sharp bilinear and LP saddle-point problems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log", choices=["error", "info", "debug"], help="Log level; defaults to SADDLE_LOG.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (generate_command, solve_command, bench_command, verify_command):
        module.add_parser(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``saddlevr`` console script; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    configure_logging(args.log)
    try:
        return args.handler(args)
    except (DivergenceError, StructuralError, json.JSONDecodeError) as e:
        # malformed problem files fail the run
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SaddleError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
