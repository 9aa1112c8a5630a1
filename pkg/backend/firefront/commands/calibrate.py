"""firefront calibrate: tint the pixels a threshold set selects, for tuning."""

import argparse
import logging
from pathlib import Path

from firefront.commands._common import add_config_argument, load_config
from firefront.errors import BoundsError, ConfigError
from firefront.services.imagery_service import crop, load_sequence, rgb_to_hsv
from firefront.services.segmentation_service import calibrate_preview

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("calibrate", help="Write a threshold preview for one frame")
    add_config_argument(parser, required=False)
    parser.add_argument("--input", type=Path, required=True, help="Frame directory")
    parser.add_argument("--frame", type=int, default=0, help="Sampled frame number")
    parser.add_argument("--label", default=None, help="Class to preview (default: track_label)")
    parser.add_argument("--out", type=Path, required=True, help="Preview PNG path")
    parser.add_argument(
        "--probe",
        type=int,
        nargs=2,
        metavar=("X", "Y"),
        action="append",
        default=[],
        help="Print the pixel value (and HSV for visual frames) at X Y",
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    frames = load_sequence(args.input, config.sequence)
    if not 0 <= args.frame < len(frames):
        raise BoundsError(f"frame {args.frame} outside the {len(frames)} sampled frames")
    frame = frames[args.frame]
    if config.sequence.roi is not None:
        frame = crop(frame, config.sequence.roi)

    seg = config.segmentation
    label = args.label or seg.track_label
    if frame.kind == "visual":
        if label not in seg.visual:
            raise ConfigError(f"no visual thresholds for '{label}'")
        thresholds = seg.visual[label]
    else:
        thresholds = seg.thermal
    overlay = calibrate_preview(frame, thresholds, args.out, label=label)

    for x, y in args.probe:
        if not (0 <= x < frame.width_px and 0 <= y < frame.height_px):
            raise BoundsError(f"probe ({x}, {y}) outside the frame")
        value = frame.pixels[y, x]
        if frame.kind == "visual":
            rgb = tuple(int(c) for c in value)
            hsv = rgb_to_hsv(rgb)
            print(f"({x}, {y}) rgb={rgb} hsv=({hsv.h:.1f}, {hsv.s:.3f}, {hsv.v:.3f})")
        else:
            print(f"({x}, {y}) temperature={float(value):.2f}")
    print(f"Wrote preview {args.out} ({overlay.shape[1]}x{overlay.shape[0]}, label {label})")
    return 0
