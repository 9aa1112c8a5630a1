"""Imagery service layer: loads, subsamples, converts and crops frame sequences."""

import logging
from pathlib import Path

import cv2
import numpy as np
import pandas as pd
from matplotlib import colors

from firefront.errors import (
    BoundsError,
    ConfigError,
    DimensionMismatchError,
    EmptyInputError,
    ExportError,
    LoadError,
)
from firefront.models import Frame, HsvPixel
from firefront.schemas.config import STRIDE_TOLERANCE, Roi, SequenceMeta

__all__ = [
    "load_sequence",
    "load_frame_pixels",
    "list_frame_files",
    "resample",
    "rgb_to_hsv",
    "rgb_to_hsv_image",
    "hsv_to_rgb_image",
    "crop",
    "read_mask_png",
    "write_frame",
]

logger = logging.getLogger(__name__)

FRAME_GLOB = {"visual": "frame_*.png", "infrared": "frame_*.csv"}


def list_frame_files(directory: str | Path, kind: str) -> list[Path]:
    """Return the frame files of one kind in lexicographic order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise LoadError(directory, "not a directory")
    return sorted(directory.glob(FRAME_GLOB[kind]), key=lambda p: p.name)


def load_frame_pixels(path: Path, kind: str) -> np.ndarray:
    """Read one frame file: RGB uint8 for PNG, float64 grid for CSV."""
    if kind == "visual":
        bgr = cv2.imread(str(path), cv2.IMREAD_COLOR)
        if bgr is None:
            raise LoadError(path)
        return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)
    try:
        grid = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise LoadError(path, str(exc)) from exc
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise LoadError(path, "empty or non-finite temperature grid")
    return grid


def load_sequence(directory: str | Path, meta: SequenceMeta) -> list[Frame]:
    """
    Load a frame directory subsampled at the configured rate.

    Keeps every stride-th file (stride = f / f_s). Frame.index is the native
    file position and timestamps are k / f_s for the k-th kept frame. With
    max_duration_s set, only frames with timestamp < max_duration_s are kept.
    """
    files = list_frame_files(directory, meta.kind)
    if not files:
        raise EmptyInputError(f"No {FRAME_GLOB[meta.kind]} files in {directory}")

    stride = meta.stride
    frames: list[Frame] = []
    shape: tuple[int, ...] | None = None
    for k, index in enumerate(range(0, len(files), stride)):
        timestamp = k / meta.sample_rate_hz
        if meta.max_duration_s is not None and timestamp >= meta.max_duration_s:
            break
        path = files[index]
        pixels = load_frame_pixels(path, meta.kind)
        if shape is None:
            shape = pixels.shape
        elif pixels.shape != shape:
            raise DimensionMismatchError(
                f"{path.name} has shape {pixels.shape[:2]}, expected {shape[:2]}"
            )
        frames.append(Frame(index=index, timestamp_s=timestamp, kind=meta.kind, pixels=pixels))

    if meta.roi is not None and not meta.roi.fits(frames[0].width_px, frames[0].height_px):
        raise BoundsError(
            f"roi {meta.roi.model_dump()} exceeds frame size "
            f"{frames[0].width_px}x{frames[0].height_px}"
        )

    logger.info(
        f"Loaded {len(frames)} of {len(files)} {meta.kind} frames from {directory} "
        f"(stride {stride})"
    )
    return frames


def resample(frames: list[Frame], from_rate_hz: float, to_rate_hz: float) -> list[Frame]:
    """Subsample an already-sampled sequence; to_rate_hz must divide from_rate_hz."""
    ratio = from_rate_hz / to_rate_hz
    stride = round(ratio)
    if to_rate_hz > from_rate_hz or abs(ratio - stride) >= STRIDE_TOLERANCE:
        raise ConfigError(f"cannot resample {from_rate_hz} Hz to {to_rate_hz} Hz")
    return [
        Frame(index=f.index, timestamp_s=k / to_rate_hz, kind=f.kind, pixels=f.pixels)
        for k, f in enumerate(frames[::stride])
    ]


def rgb_to_hsv_image(rgb: np.ndarray) -> np.ndarray:
    """Convert uint8 RGB (..., 3) to float HSV with hue in degrees [0, 360)."""
    hsv = colors.rgb_to_hsv(np.asarray(rgb, dtype=np.float64) / 255.0)
    # Hue is 0 for gray pixels by the hexcone convention matplotlib follows
    hsv[..., 0] = (hsv[..., 0] * 360.0) % 360.0
    return hsv


def hsv_to_rgb_image(hsv: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_hsv_image, returning uint8 RGB."""
    scaled = np.array(hsv, dtype=np.float64, copy=True)
    scaled[..., 0] = scaled[..., 0] / 360.0
    rgb = colors.hsv_to_rgb(scaled) * 255.0
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def rgb_to_hsv(p: tuple[int, int, int]) -> HsvPixel:
    if any(not 0 <= c <= 255 for c in p):
        raise ValueError(f"RGB channels must lie in [0, 255], got {p}")
    h, s, v = rgb_to_hsv_image(np.array(p, dtype=np.uint8).reshape(1, 1, 3))[0, 0]
    return HsvPixel(h=float(h), s=float(s), v=float(v))


def crop(frame: Frame, roi: Roi) -> Frame:
    if not roi.fits(frame.width_px, frame.height_px):
        raise BoundsError(
            f"roi {roi.model_dump()} exceeds frame size {frame.width_px}x{frame.height_px}"
        )
    return frame.with_pixels(frame.pixels[roi.y : roi.y_end, roi.x : roi.x_end].copy())


def read_mask_png(path: str | Path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a mask image; any nonzero pixel is set."""
    gray = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if gray is None:
        raise LoadError(path)
    mask = gray > 0
    if shape is not None and mask.shape != tuple(shape):
        raise DimensionMismatchError(f"mask {path} has shape {mask.shape}, expected {shape}")
    return mask


def write_frame(path: str | Path, frame: Frame) -> Path:
    """Write a frame in the format load_frame_pixels reads back (PNG or CSV)."""
    path = Path(path)
    try:
        if frame.kind == "visual":
            ok = cv2.imwrite(str(path), cv2.cvtColor(frame.pixels, cv2.COLOR_RGB2BGR))
            if not ok:
                raise ExportError(path, "image encoder refused the path")
        else:
            pd.DataFrame(frame.pixels).to_csv(path, header=False, index=False)
    except (OSError, cv2.error) as exc:
        raise ExportError(path, str(exc)) from exc
    return path
