"""Segmentation service layer: RGB∧HSV and temperature-band thresholding."""

import logging
from pathlib import Path

import cv2
import numpy as np
from matplotlib import colormaps

from firefront.config import PREVIEW_ALPHA, PREVIEW_TINT
from firefront.errors import ConfigError, ExportError, KindMismatchError
from firefront.models import BinaryMask, Frame
from firefront.schemas.config import ColorThresholds, SegmentationConfig, ThermalBands
from firefront.services.imagery_service import rgb_to_hsv_image

__all__ = [
    "rgb_mask",
    "hsv_mask",
    "segment_visual",
    "segment_infrared",
    "segment_classes",
    "segment_track",
    "render_frame_rgb",
    "calibrate_preview",
]

logger = logging.getLogger(__name__)

PREVIEW_COLORMAP = "inferno"


def _require_kind(frame: Frame, kind: str) -> None:
    if frame.kind != kind:
        raise KindMismatchError(f"frame {frame.index} is {frame.kind}, expected {kind}")


def rgb_mask(pixels: np.ndarray, th: ColorThresholds) -> BinaryMask:
    lo = np.array(th.rgb_lo, dtype=np.uint8)
    hi = np.array(th.rgb_hi, dtype=np.uint8)
    return np.all((pixels >= lo) & (pixels <= hi), axis=-1)


def hsv_mask(pixels: np.ndarray, th: ColorThresholds) -> BinaryMask:
    hsv = rgb_to_hsv_image(pixels)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h_lo, s_lo, v_lo = th.hsv_lo
    h_hi, s_hi, v_hi = th.hsv_hi
    if th.hue_wraps:
        hue_ok = (h >= h_lo) | (h <= h_hi)
    else:
        hue_ok = (h >= h_lo) & (h <= h_hi)
    return hue_ok & (s >= s_lo) & (s <= s_hi) & (v >= v_lo) & (v <= v_hi)


def segment_visual(frame: Frame, th: ColorThresholds) -> BinaryMask:
    """Set pixels passing both the RGB box and the HSV box."""
    _require_kind(frame, "visual")
    return rgb_mask(frame.pixels, th) & hsv_mask(frame.pixels, th)


def segment_infrared(frame: Frame, bands: ThermalBands, target_label: str) -> BinaryMask:
    """Set pixels whose temperature lies in [t_lo, t_hi) of the target band."""
    _require_kind(frame, "infrared")
    for band in bands.bands:
        if band.label == target_label:
            return (frame.pixels >= band.t_lo) & (frame.pixels < band.t_hi)
    raise ConfigError(f"No thermal band labelled '{target_label}' (have {bands.labels()})")


def segment_classes(frame: Frame, config: SegmentationConfig) -> dict[str, BinaryMask]:
    """Raw per-class masks for one frame, keyed by class label."""
    if frame.kind == "visual":
        return {label: segment_visual(frame, th) for label, th in config.visual.items()}
    return {
        label: segment_infrared(frame, config.thermal, label) for label in config.thermal.labels()
    }


def segment_track(frame: Frame, config: SegmentationConfig) -> BinaryMask:
    """Mask of the tracked class, with the optional refinement pass applied."""
    if frame.kind == "visual":
        mask = segment_visual(frame, config.visual[config.track_label])
        if config.refine is not None:
            mask &= segment_visual(frame, config.refine)
        return mask
    return segment_infrared(frame, config.thermal, config.track_label)


def render_frame_rgb(frame: Frame) -> np.ndarray:
    """RGB view of a frame; infrared grids are min-max scaled through a colormap."""
    if frame.kind == "visual":
        return np.array(frame.pixels, dtype=np.uint8, copy=True)
    grid = frame.pixels
    lo, hi = float(grid.min()), float(grid.max())
    scaled = (grid - lo) / (hi - lo) if hi > lo else np.zeros_like(grid)
    rgba = colormaps[PREVIEW_COLORMAP](scaled)
    return np.rint(rgba[..., :3] * 255.0).astype(np.uint8)


def calibrate_preview(
    frame: Frame,
    thresholds: ColorThresholds | ThermalBands,
    out_path: str | Path,
    label: str = "burning",
) -> np.ndarray:
    """
    Write the frame with mask pixels tinted, for threshold tuning.

    Unmasked pixels are left exactly as rendered. Returns the RGB overlay.
    """
    if isinstance(thresholds, ThermalBands):
        mask = segment_infrared(frame, thresholds, label)
    else:
        mask = segment_visual(frame, thresholds)

    overlay = render_frame_rgb(frame)
    tint = np.array(PREVIEW_TINT, dtype=np.float64)
    blended = (1.0 - PREVIEW_ALPHA) * overlay[mask].astype(np.float64) + PREVIEW_ALPHA * tint
    overlay[mask] = np.rint(blended).astype(np.uint8)

    out_path = Path(out_path)
    try:
        ok = cv2.imwrite(str(out_path), cv2.cvtColor(overlay, cv2.COLOR_RGB2BGR))
    except cv2.error as exc:
        raise ExportError(out_path, str(exc)) from exc
    if not ok:
        raise ExportError(out_path, "image encoder refused the path")
    logger.info(f"Wrote preview {out_path} ({int(mask.sum())} of {mask.size} pixels tinted)")
    return overlay
