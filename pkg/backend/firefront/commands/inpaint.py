"""firefront inpaint: fill an occluded region of one frame."""

import argparse
from pathlib import Path

from firefront.commands._common import add_config_argument, load_config
from firefront.errors import ConfigError, ExportError
from firefront.models import Frame
from firefront.services.imagery_service import load_frame_pixels, read_mask_png, write_frame
from firefront.services.inpaint_service import auto_occlusion, inpaint


def register(subparsers) -> None:
    parser = subparsers.add_parser("inpaint", help="Inpaint one frame")
    parser.add_argument("--input", type=Path, required=True, help="Frame file (.png or .csv)")
    parser.add_argument("--mask", type=Path, default=None, help="Occlusion mask PNG")
    add_config_argument(parser, required=False)
    parser.add_argument("--mode", choices=["harmonic", "transport"], default=None)
    parser.add_argument("--out", type=Path, required=True, help="Output frame file")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    settings = config.inpaint
    kind = "infrared" if args.input.suffix.lower() == ".csv" else "visual"
    frame = Frame(index=0, timestamp_s=0.0, kind=kind, pixels=load_frame_pixels(args.input, kind))

    if args.mask is not None:
        occ = read_mask_png(args.mask, frame.shape)
    elif settings.auto is not None or settings.auto_band is not None:
        occ = auto_occlusion(frame, settings.auto or settings.auto_band)
    elif settings.mask_path is not None:
        occ = read_mask_png(settings.mask_path, frame.shape)
    else:
        raise ConfigError("no occlusion source: pass --mask or set inpaint.auto in --config")

    filled = inpaint(
        frame, occ, settings.max_iters, settings.tol, args.mode or settings.mode, settings.dt
    )
    if kind == "visual" and args.out.suffix.lower() != ".png":
        raise ExportError(args.out, "visual frames are written as PNG")
    write_frame(args.out, filled)
    print(f"Inpainted {int(occ.sum())} pixels into {args.out}")
    return 0
