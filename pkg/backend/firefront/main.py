"""Command-line entry point for firefront."""

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from firefront import __version__
from firefront.commands import COMMANDS
from firefront.errors import EXIT_VALIDATION, FireFrontError
from firefront.logging_config import setup_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firefront",
        description="Track fire fronts and smoke plumes in visual and infrared frame sequences",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-dir", type=Path, default=None, help="Directory for log files")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_dir)

    try:
        return args.handler(args)
    except ValidationError as exc:
        logger.error(f"Invalid input: {exc}")
        return EXIT_VALIDATION
    except FireFrontError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
