"""firefront advise: Nyquist limits against observed speeds per sampling rate."""

import argparse
from pathlib import Path

from firefront.commands._common import (
    add_config_argument,
    add_run_arguments,
    load_config,
    write_json,
)
from firefront.schemas.results import SamplingReport
from firefront.services.pipeline_service import advise


def register(subparsers) -> None:
    parser = subparsers.add_parser("advise", help="Recommend a sampling rate")
    add_config_argument(parser)
    parser.add_argument("--input", type=Path, required=True, help="Frame directory")
    parser.add_argument(
        "--rates", type=float, nargs="+", required=True, help="Candidate sampling rates (Hz)"
    )
    parser.add_argument("--out", type=Path, default=None, help="Write the report as JSON")
    add_run_arguments(parser)
    parser.set_defaults(handler=handle)


def format_sampling_report(report: SamplingReport) -> str:
    lines = [
        f"FOV {report.fov_px} px, RES {report.resolution_px_per_cm} px/cm",
        f"{'f (Hz)':>8}{'u_max':>10}{'u_min':>10}{'u_obs':>10}{'ratio':>8}  note",
    ]
    for row in report.rows:
        u_min = f"{row.u_min:.1f}" if row.u_min is not None else "-"
        note = "degenerate" if row.degenerate else ("saturated" if row.saturated else "")
        lines.append(
            f"{row.f_hz:>8g}{row.u_max:>10.1f}{u_min:>10}{row.u_obs:>10.1f}"
            f"{row.ratio:>8.3f}  {note}"
        )
    if report.recommended_f_hz is not None:
        lines.append(f"Recommended sampling rate: {report.recommended_f_hz:g} Hz")
    else:
        lines.append("No recommendation (needs at least two usable rates)")
    return "\n".join(lines)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed)
    report = advise(config, args.input, args.rates, threads=args.threads)
    if args.out is not None:
        write_json(args.out, report.model_dump(mode="json"))
    print(format_sampling_report(report))
    return 0
