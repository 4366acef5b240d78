__all__ = ["build_parser", "main"]

from .cli_main import build_parser, main
