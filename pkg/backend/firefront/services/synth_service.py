"""Synth service layer: synthetic sequences with analytic ground truth."""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
import pandas as pd
from scipy import ndimage

from firefront.errors import ExportError, ScenarioError
from firefront.models import BinaryMask, Frame, LabelGrid
from firefront.schemas.config import (
    ClusteringConfig,
    ColorThresholds,
    InpaintConfig,
    PipelineConfig,
    SegmentationConfig,
    SequenceMeta,
    TrackingConfig,
)
from firefront.schemas.scenario import Scenario
from firefront.services.export_service import compose_labels
from firefront.services.imagery_service import write_frame

__all__ = [
    "FIRE_RGB",
    "BURNED_RGB",
    "BACKGROUND_RGB",
    "OCCLUDER_RGB",
    "OCCLUDER_THRESHOLDS",
    "OCCLUDER_BAND",
    "GroundTruth",
    "ignition_frames",
    "render",
    "scenario_config",
    "write_scenario",
]

logger = logging.getLogger(__name__)

# Palette - hardcoded for easy tweaking; the default thresholds segment it exactly
FIRE_RGB = (255, 140, 0)
BURNED_RGB = (45, 35, 30)
BACKGROUND_RGB = (60, 120, 40)
OCCLUDER_RGB = (20, 90, 20)
SMOKE_GRAY = (150, 215)

# Temperatures (deg C)
AMBIENT_C = 20.0
BURNING_C = 700.0
BURNED_C = 120.0
PREHEATED_C = 275.0
OCCLUDER_C = 30.0

OCCLUDER_THRESHOLDS = ColorThresholds(rgb_lo=(0, 70, 0), rgb_hi=(40, 110, 40))
OCCLUDER_BAND = (25.0, 40.0)

# Frames assigned to pixels the front never reaches
_NEVER = np.iinfo(np.int64).max // 4


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Analytic answer for one rendered scenario.

    boundaries holds one float (N, 3) array of (x, y, normal_speed) per frame,
    sampled about one point per pixel of front length; normal_speed is in
    px/frame. burn_time is seconds per pixel, NaN where a pixel never burned.
    """

    masks: list[dict[str, BinaryMask]]
    labels: list[LabelGrid]
    boundaries: list[np.ndarray]
    burn_time: np.ndarray
    occlusion: BinaryMask


def _grid(sc: Scenario) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.mgrid[0 : sc.height, 0 : sc.width]
    return xs.astype(np.float64), ys.astype(np.float64)


def _flank_offset(sc: Scenario, y: np.ndarray) -> np.ndarray:
    """How far a flank front trails its leading point at row y (0 at the center row)."""
    half = sc.height / 2.0
    return sc.bow * ((y - sc.center_xy[1]) / half) ** 2


def _front_distance(sc: Scenario) -> np.ndarray:
    """Distance the front has to travel before reaching each pixel (<= 0: burning at t=0)."""
    xs, ys = _grid(sc)
    cx, cy = sc.center_xy
    if sc.kind == "expanding_disk":
        return np.hypot(xs - cx, ys - cy) - sc.radius0
    if sc.kind == "translating_front":
        return xs - sc.front_x0
    if sc.kind == "ring_fire":
        d = np.hypot(xs - cx, ys - cy)
        return np.where(d <= sc.radius0, sc.radius0 - d, np.inf)
    if sc.kind == "two_flanks":
        left = cx - sc.separation / 2.0 - _flank_offset(sc, ys)
        right = cx + sc.separation / 2.0 + _flank_offset(sc, ys)
        return np.minimum(xs - left, right - xs)
    return np.full(xs.shape, np.inf)


def ignition_frames(sc: Scenario) -> np.ndarray:
    """First frame at which each pixel burns: the smallest t with distance <= v * t."""
    phi = _front_distance(sc)
    v = sc.speed_px_per_frame
    ign = np.full(phi.shape, _NEVER, dtype=np.int64)
    ign[phi <= 0] = 0
    if v > 0:
        ahead = np.isfinite(phi) & (phi > 0)
        ign[ahead] = np.ceil(phi[ahead] / v).astype(np.int64)
    return ign


def _check_bounds(sc: Scenario) -> None:
    last = sc.frames - 1
    v = sc.speed_px_per_frame
    cx, cy = sc.center_xy
    w, h = sc.width - 1, sc.height - 1

    def inside(x0: float, y0: float, x1: float, y1: float) -> bool:
        return x0 >= 0 and y0 >= 0 and x1 <= w and y1 <= h

    if sc.kind == "expanding_disk":
        r = sc.radius0 + v * last
        ok = inside(cx - r, cy - r, cx + r, cy + r)
    elif sc.kind == "ring_fire":
        r = sc.radius0
        ok = inside(cx - r, cy - r, cx + r, cy + r)
    elif sc.kind == "translating_front":
        ok = 0 <= sc.front_x0 and sc.front_x0 + v * last <= w
    elif sc.kind == "two_flanks":
        left = cx - sc.separation / 2.0
        right = cx + sc.separation / 2.0
        ok = left - sc.bow >= 0 and right + sc.bow <= w
        if sc.separation - 2.0 * v * last <= 0:
            raise ScenarioError(
                f"two_flanks fronts meet before frame {last} "
                f"(separation {sc.separation}, speed {v})"
            )
    else:
        u, wv = sc.plume_velocity
        r = sc.plume_radius
        xs = [cx, cx + u * last]
        ys = [cy, cy - wv * last]
        ok = inside(min(xs) - r, min(ys) - r, max(xs) + r, max(ys) + r)
    if not ok:
        raise ScenarioError(f"{sc.kind} geometry leaves the {sc.width}x{sc.height} frame")
    for roi in sc.occlusions:
        if not roi.fits(sc.width, sc.height):
            raise ScenarioError(f"occlusion {roi.model_dump()} leaves the frame")


def _circle(cx: float, cy: float, r: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points about one pixel apart on a circle, with unit outward normals."""
    n = max(8, math.ceil(2.0 * math.pi * r))
    theta = 2.0 * math.pi * np.arange(n) / n
    nx, ny = np.cos(theta), np.sin(theta)
    return np.column_stack([cx + r * nx, cy + r * ny]), nx, ny


def _truth_boundary(sc: Scenario, t: int) -> np.ndarray:
    v = sc.speed_px_per_frame
    cx, cy = sc.center_xy
    if sc.kind == "expanding_disk":
        pts, _, _ = _circle(cx, cy, sc.radius0 + v * t)
        speed = np.full(len(pts), v)
    elif sc.kind == "ring_fire":
        r = sc.radius0 - v * t
        if r <= 0:
            return np.empty((0, 3))
        pts, _, _ = _circle(cx, cy, r)
        speed = np.full(len(pts), v)
    elif sc.kind == "translating_front":
        ys = np.arange(sc.height, dtype=np.float64)
        pts = np.column_stack([np.full(sc.height, sc.front_x0 + v * t), ys])
        speed = np.full(sc.height, v)
    elif sc.kind == "two_flanks":
        ys = np.arange(sc.height, dtype=np.float64)
        offset = _flank_offset(sc, ys)
        slope = 2.0 * sc.bow * (ys - cy) / (sc.height / 2.0) ** 2
        left = np.column_stack([cx - sc.separation / 2.0 - offset + v * t, ys])
        right = np.column_stack([cx + sc.separation / 2.0 + offset - v * t, ys])
        pts = np.concatenate([left, right])
        speed = np.tile(v / np.sqrt(1.0 + slope * slope), 2)
    else:
        u, w = sc.plume_velocity
        pts, nx, ny = _circle(cx + u * t, cy - w * t, sc.plume_radius)
        speed = u * nx - w * ny

    keep = (
        (pts[:, 0] >= 0)
        & (pts[:, 0] <= sc.width - 1)
        & (pts[:, 1] >= 0)
        & (pts[:, 1] <= sc.height - 1)
    )
    return np.column_stack([pts[keep], speed[keep]])


def _plume_density(sc: Scenario, t: int) -> tuple[BinaryMask, np.ndarray]:
    xs, ys = _grid(sc)
    cx, cy = sc.center_xy
    u, w = sc.plume_velocity
    disk = np.hypot(xs - (cx + u * t), ys - (cy - w * t)) <= sc.plume_radius
    density = cv2.GaussianBlur(
        disk.astype(np.float32), (0, 0), sigmaX=max(sc.plume_radius / 4.0, 1.0)
    )
    return disk, density.astype(np.float64)


def _class_masks(sc: Scenario, ign: np.ndarray, t: int) -> dict[str, BinaryMask]:
    if sc.kind == "advected_plume":
        disk, _ = _plume_density(sc, t)
        empty = np.zeros(disk.shape, dtype=bool)
        return {"burning": empty, "burned_cooling": empty.copy(), "smoke": disk}

    tau = sc.burn_duration_frames
    ignited = ign <= t
    if tau is None:
        burning, burned = ignited, np.zeros_like(ignited)
    else:
        burned = ignited & (t >= ign + tau)
        burning = ignited & ~burned
    masks = {
        "burning": burning,
        "burned_cooling": burned,
        "smoke": np.zeros_like(burning),
    }
    if sc.preheat_px > 0:
        dist = ndimage.distance_transform_edt(~burning) if burning.any() else None
        masks["preheated"] = (
            (~ignited) & (dist <= sc.preheat_px)
            if dist is not None
            else np.zeros_like(burning)
        )
    return masks


def _render_frame(
    sc: Scenario, t: int, masks: dict[str, BinaryMask], occlusion: BinaryMask
) -> np.ndarray:
    rng = np.random.default_rng([sc.seed, t])
    salt = rng.random((sc.height, sc.width)) < sc.noise if sc.noise > 0 else None

    if sc.modality == "infrared":
        grid = np.full((sc.height, sc.width), AMBIENT_C)
        if "preheated" in masks:
            grid[masks["preheated"]] = PREHEATED_C
        grid[masks["burned_cooling"]] = BURNED_C
        grid[masks["burning"]] = BURNING_C
        if salt is not None:
            grid[salt] = BURNING_C
        grid[occlusion] = OCCLUDER_C
        return grid

    image = np.empty((sc.height, sc.width, 3), dtype=np.uint8)
    image[:] = BACKGROUND_RGB
    image[masks["burned_cooling"]] = BURNED_RGB
    image[masks["burning"]] = FIRE_RGB
    if masks["smoke"].any():
        _, density = _plume_density(sc, t)
        lo, hi = SMOKE_GRAY
        gray = np.rint(lo + (hi - lo) * np.clip(density, 0.0, 1.0)).astype(np.uint8)
        smoke = masks["smoke"]
        image[smoke] = np.repeat(gray[smoke][:, None], 3, axis=1)
    if salt is not None:
        image[salt & ~masks["burning"]] = FIRE_RGB
    image[occlusion] = OCCLUDER_RGB
    return image


def render(sc: Scenario, threads: int = 1) -> tuple[list[Frame], GroundTruth]:
    """
    Render every frame of a scenario along with its analytic ground truth.

    Noise for frame t is drawn from a generator seeded with (seed, t), so
    seeds only change noise pixels and any thread count gives the same frames.
    """
    _check_bounds(sc)
    ign = ignition_frames(sc)
    occlusion = np.zeros((sc.height, sc.width), dtype=bool)
    for roi in sc.occlusions:
        occlusion[roi.y : roi.y_end, roi.x : roi.x_end] = True

    def build(t: int) -> tuple[dict[str, BinaryMask], np.ndarray]:
        masks = _class_masks(sc, ign, t)
        return masks, _render_frame(sc, t, masks, occlusion)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rendered = list(pool.map(build, range(sc.frames)))
    else:
        rendered = [build(t) for t in range(sc.frames)]

    frames = [
        Frame(index=t, timestamp_s=t / sc.frame_rate_hz, kind=sc.modality, pixels=pixels)
        for t, (_, pixels) in enumerate(rendered)
    ]
    masks = [m for m, _ in rendered]
    labels = [compose_labels(m) for m in masks]

    burn_frames = np.stack([m["burning"] for m in masks]).sum(axis=0).astype(np.float64)
    burn_time = burn_frames / sc.frame_rate_hz
    burn_time[burn_frames == 0] = np.nan

    truth = GroundTruth(
        masks=masks,
        labels=labels,
        boundaries=[_truth_boundary(sc, t) for t in range(sc.frames)],
        burn_time=burn_time,
        occlusion=occlusion,
    )
    logger.info(f"Rendered {sc.kind} ({sc.modality}): {sc.frames} frames {sc.width}x{sc.height}")
    return frames, truth


def scenario_config(sc: Scenario) -> PipelineConfig:
    """Pipeline configuration that reads a rendered scenario at its native rate."""
    track_label = "smoke" if sc.kind == "advected_plume" else "burning"
    inpaint = InpaintConfig()
    if sc.occlusions:
        if sc.modality == "visual":
            inpaint = InpaintConfig(enabled=True, auto=OCCLUDER_THRESHOLDS)
        else:
            inpaint = InpaintConfig(enabled=True, auto_band=OCCLUDER_BAND)
    return PipelineConfig(
        sequence=SequenceMeta(
            kind=sc.modality,
            frame_rate_hz=sc.frame_rate_hz,
            sample_rate_hz=sc.frame_rate_hz,
            resolution_px_per_cm=sc.resolution_px_per_cm,
            fov_px=sc.width,
        ),
        segmentation=SegmentationConfig(track_label=track_label),
        # Flank fronts are separate regions only while their gap exceeds eps
        clustering=ClusteringConfig(enabled=sc.kind == "two_flanks"),
        tracking=TrackingConfig(axis_deg=-90.0 if sc.kind == "advected_plume" else 0.0),
        inpaint=inpaint,
        seed=sc.seed,
    )


def write_scenario(sc: Scenario, out_dir: str | Path, threads: int = 1) -> Path:
    """
    Render a scenario into the directory layout the pipeline reads.

    Returns the frames directory.
    """
    out_dir = Path(out_dir)
    frames, truth = render(sc, threads=threads)
    frames_dir = out_dir / "frames"
    try:
        for sub in (frames_dir, out_dir / "truth" / "labels", out_dir / "truth" / "boundaries"):
            sub.mkdir(parents=True, exist_ok=True)

        ext = "png" if sc.modality == "visual" else "csv"
        for frame in frames:
            write_frame(frames_dir / f"frame_{frame.index:06d}.{ext}", frame)
        for t, (grid, points) in enumerate(zip(truth.labels, truth.boundaries, strict=True)):
            pd.DataFrame(grid).to_csv(
                out_dir / "truth" / "labels" / f"t{t:06d}.csv", header=False, index=False
            )
            table = pd.DataFrame(points.reshape(-1, 3), columns=["x", "y", "normal_speed"])
            table.to_csv(out_dir / "truth" / "boundaries" / f"t{t:06d}.csv", index=False)
        pd.DataFrame(truth.burn_time).to_csv(
            out_dir / "truth" / "burn_time.csv", header=False, index=False, na_rep="nan"
        )
        if truth.occlusion.any():
            cv2.imwrite(
                str(out_dir / "truth" / "occlusion.png"), truth.occlusion.astype(np.uint8) * 255
            )

        (out_dir / "scenario.json").write_text(
            json.dumps(sc.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        (out_dir / "config.json").write_text(
            json.dumps(scenario_config(sc).model_dump(mode="json"), indent=2, sort_keys=True)
            + "\n",
            encoding="utf-8",
        )
    except OSError as exc:
        raise ExportError(getattr(exc, "filename", None) or out_dir, str(exc)) from exc

    logger.info(f"Wrote {sc.kind} scenario to {out_dir}")
    return frames_dir
