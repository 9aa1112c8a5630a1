"""firefront config init: write a fully populated default configuration."""

import argparse
import json
from pathlib import Path

from firefront.commands._common import write_json
from firefront.schemas.config import PipelineConfig


def register(subparsers) -> None:
    parser = subparsers.add_parser("config", help="Configuration helpers")
    actions = parser.add_subparsers(dest="action", required=True)
    init = actions.add_parser("init", help="Emit the default configuration document")
    init.add_argument("--out", type=Path, default=None, help="Target file (default: stdout)")
    init.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    payload = PipelineConfig().model_dump(mode="json")
    if args.out is None:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        write_json(args.out, payload)
        print(f"Wrote default configuration to {args.out}")
    return 0
