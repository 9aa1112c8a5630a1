"""firefront synth: render a synthetic scenario in the pipeline's input layout."""

import argparse
import logging
from pathlib import Path
from typing import get_args

from firefront.commands._common import add_run_arguments
from firefront.errors import LoadError
from firefront.schemas.scenario import Scenario, ScenarioKind
from firefront.services.synth_service import write_scenario

logger = logging.getLogger(__name__)

# CLI flags that map one-to-one onto Scenario fields
_OVERRIDES = ("width", "height", "frames", "noise", "modality")


def register(subparsers) -> None:
    parser = subparsers.add_parser("synth", help="Render a synthetic scenario")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--kind", choices=get_args(ScenarioKind))
    source.add_argument("--scenario", type=Path, help="Scenario JSON document")
    parser.add_argument("--out", type=Path, required=True, help="Output directory")
    parser.add_argument("--width", type=int)
    parser.add_argument("--height", type=int)
    parser.add_argument("--frames", type=int)
    parser.add_argument("--noise", type=float, help="Salt-noise rate in [0, 1]")
    parser.add_argument("--modality", choices=["visual", "infrared"])
    add_run_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.scenario is not None:
        try:
            data = Scenario.model_validate_json(args.scenario.read_text(encoding="utf-8"))
        except OSError as exc:
            raise LoadError(args.scenario, exc.strerror or str(exc)) from exc
        fields = data.model_dump()
    else:
        fields = {"kind": args.kind}
    for name in _OVERRIDES:
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if args.seed is not None:
        fields["seed"] = args.seed

    scenario = Scenario.model_validate(fields)
    frames_dir = write_scenario(scenario, args.out, threads=args.threads)
    print(f"Wrote {scenario.frames} {scenario.modality} frames to {frames_dir}")
    print(f"Run with: firefront run --config {args.out / 'config.json'} --input {frames_dir}")
    return 0
