"""firefront run: execute the full pipeline and export a dataset bundle."""

import argparse
from pathlib import Path

from firefront.commands._common import add_config_argument, add_run_arguments, load_config
from firefront.services.pipeline_service import format_report, run_pipeline


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="Run the pipeline on a frame directory")
    add_config_argument(parser)
    parser.add_argument("--input", type=Path, required=True, help="Frame directory")
    parser.add_argument("--out", type=Path, required=True, help="Bundle output directory")
    add_run_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed)
    _, report = run_pipeline(config, args.input, args.out, threads=args.threads)
    print(format_report(report))
    return 0
