"""Pipeline service layer: config-driven batch run from frames to dataset bundle."""

import hashlib
import logging
import math
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

import numpy as np
from pydantic import ValidationError

from firefront import __version__
from firefront.errors import ConfigError, PipelineStageError
from firefront.models import BinaryMask, Frame, LabelGrid, SampleSet, TrackingResult
from firefront.schemas.config import PipelineConfig, SequenceMeta
from firefront.schemas.results import (
    FitResult,
    Manifest,
    RunReport,
    SampleSummary,
    SamplingReport,
)
from firefront.services.boundary_service import region_boundary
from firefront.services.cleaning_service import clean
from firefront.services.clustering_service import mask_points, split_regions
from firefront.services.export_service import (
    DatasetBundle,
    burn_time_per_pixel,
    compose_labels,
    write_bundle,
)
from firefront.services.fitting_service import fit_all, velocity_sample_sets
from firefront.services.imagery_service import (
    crop,
    list_frame_files,
    load_sequence,
    read_mask_png,
)
from firefront.services.inpaint_service import auto_occlusion, inpaint
from firefront.services.plotting_service import (
    boundary_overlay,
    displacement_quiver,
    figure_to_rgb,
    histogram_with_fit,
)
from firefront.services.segmentation_service import segment_classes, segment_track
from firefront.services.stats_service import inclination_angle, sampling_advisor, summarize
from firefront.services.tracking_service import default_max_dist_px, track_sequence

__all__ = ["FrameResult", "run_pipeline", "advise", "format_report"]

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(eq=False)
class FrameResult:
    """Per-frame output of the segment -> clean -> split -> boundary stages."""

    labels: LabelGrid
    boundary: np.ndarray  # int (N, 3) rows of (region_id, x, y)
    regions: int
    warnings: list[str] = field(default_factory=list)


@contextmanager
def _stage(name: str, frame_index: int | None = None) -> Iterator[None]:
    try:
        yield
    except PipelineStageError:
        raise
    except Exception as exc:
        raise PipelineStageError(name, frame_index, exc) from exc


def _map(fn: Callable[[T], R], items: Sequence[T], threads: int) -> list[R]:
    """Order-preserving map; any thread count returns the same list."""
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _load(config: PipelineConfig, input_dir: Path) -> list[Frame]:
    with _stage("load"):
        frames = load_sequence(input_dir, config.sequence)
    roi = config.sequence.roi
    if roi is None:
        return frames
    with _stage("crop"):
        return [crop(frame, roi) for frame in frames]


def _static_occlusion(config: PipelineConfig, frame: Frame) -> BinaryMask | None:
    settings = config.inpaint
    if not settings.enabled or settings.mask_path is None:
        return None
    roi = config.sequence.roi
    with _stage("inpaint"):
        mask = read_mask_png(settings.mask_path)
        if roi is not None:
            mask = mask[roi.y : roi.y_end, roi.x : roi.x_end]
        if mask.shape != frame.shape:
            raise ConfigError(f"occlusion mask shape {mask.shape} does not match {frame.shape}")
    return mask


def _process_frame(
    config: PipelineConfig, frame: Frame, occlusion: BinaryMask | None
) -> FrameResult:
    settings = config.inpaint
    if settings.enabled:
        with _stage("inpaint", frame.index):
            occ = occlusion
            if occ is None:
                occ = auto_occlusion(frame, settings.auto or settings.auto_band)
            frame = inpaint(
                frame, occ, settings.max_iters, settings.tol, settings.mode, settings.dt
            )

    seg = config.segmentation
    with _stage("segment", frame.index):
        masks = segment_classes(frame, seg)
        masks[seg.track_label] = segment_track(frame, seg)
    with _stage("clean", frame.index):
        masks = {label: clean(mask, config.cleaning) for label, mask in masks.items()}
        labels = compose_labels(masks, frame.shape)

    tracked = masks[seg.track_label]
    with _stage("cluster", frame.index):
        if config.clustering.enabled:
            regions = split_regions(tracked, config.clustering.eps, config.clustering.min_pts)
        else:
            pts = mask_points(tracked)
            regions = [pts] if len(pts) else []

    warnings: list[str] = []
    rows = []
    with _stage("boundary", frame.index):
        for region_id, pts in enumerate(regions):
            boundary = region_boundary(pts, config.boundary.alpha)
            if boundary is None:
                warnings.append(
                    f"frame {frame.index}: region {region_id} ({len(pts)} points) is degenerate, "
                    "skipped"
                )
                continue
            edge_pts = boundary.boundary_points
            rows.append(
                np.column_stack([np.full(len(edge_pts), region_id, dtype=np.int64), edge_pts])
            )
    boundary_rows = np.concatenate(rows) if rows else np.empty((0, 3), dtype=np.int64)
    return FrameResult(
        labels=labels, boundary=boundary_rows, regions=len(regions), warnings=warnings
    )


def _process_frames(
    config: PipelineConfig, frames: list[Frame], threads: int
) -> list[FrameResult]:
    occlusion = _static_occlusion(config, frames[0])
    return _map(lambda frame: _process_frame(config, frame, occlusion), frames, threads)


def _track(
    config: PipelineConfig, results: list[FrameResult], threads: int
) -> TrackingResult:
    meta = config.sequence
    max_dist = config.tracking.max_dist_px or default_max_dist_px(meta)
    boundaries = [(r.boundary[:, 1:3], r.boundary[:, 0]) for r in results]
    with _stage("track"):
        return track_sequence(
            boundaries,
            meta.resolution_px_per_cm,
            meta.sample_rate_hz,
            axis_deg=config.tracking.axis_deg,
            max_dist_px=max_dist,
            threads=threads,
        )


def _checksums(input_dir: Path, config: PipelineConfig, frames: list[Frame]) -> dict[str, str]:
    files = list_frame_files(input_dir, config.sequence.kind)
    paths = [files[frame.index] for frame in frames]
    if config.inpaint.enabled and config.inpaint.mask_path is not None:
        paths.append(Path(config.inpaint.mask_path))
    return {path.name: hashlib.sha256(path.read_bytes()).hexdigest() for path in paths}


def _overlays(
    frames: list[Frame],
    results: list[FrameResult],
    tracking: TrackingResult | None,
    sample_sets: dict[str, SampleSet],
    fits: list[FitResult],
    config: PipelineConfig,
) -> dict[str, np.ndarray]:
    overlays = {
        f"overlays/boundary_t{t:06d}.png": boundary_overlay(frame, result.boundary)
        for t, (frame, result) in enumerate(zip(frames, results, strict=True))
    }
    if tracking is not None:
        for fld in tracking.fields:
            fig = displacement_quiver(frames[fld.t_index], fld)
            overlays[f"overlays/quiver_t{fld.t_index:06d}.png"] = figure_to_rgb(fig)
    for target in config.fitting.targets:
        s = sample_sets.get(target.sample)
        if s is None or len(s) < 2:
            continue
        matching = [f for f in fits if f.sample == target.sample and f.family == target.family]
        semilog = target.sample != "burn_time"
        fig = histogram_with_fit(s, matching, semilog=semilog, bins=config.fitting.bins)
        overlays[f"overlays/hist_{target.sample}_{target.family}.png"] = figure_to_rgb(fig)
    return overlays


def run_pipeline(
    config: PipelineConfig,
    input_dir: str | Path,
    out_dir: str | Path | None = None,
    threads: int = 1,
) -> tuple[DatasetBundle, RunReport]:
    """
    Run load -> [inpaint] -> segment -> clean -> [split] -> boundary -> [track]
    -> [fit] -> export, honoring the config toggles.

    Any stage error aborts the run as a PipelineStageError naming the stage
    and frame. The bundle is only written when out_dir is given, and only
    as a whole.
    """
    input_dir = Path(input_dir)
    meta = config.sequence
    frames = _load(config, input_dir)
    logger.info(
        f"Run {config.sha256()[:12]}: {len(frames)} {meta.kind} frames at {meta.sample_rate_hz} Hz"
    )

    results = _process_frames(config, frames, threads)
    warnings = [w for r in results for w in r.warnings]
    labels = [r.labels for r in results]

    tracking = None
    if config.tracking.enabled:
        tracking = _track(config, results, threads)
        warnings.extend(tracking.warnings)

    sample_sets: dict[str, SampleSet] = {}
    if tracking is not None:
        sample_sets.update(velocity_sample_sets(tracking.samples))
    with _stage("fit"):
        sample_sets["burn_time"] = burn_time_per_pixel(labels, meta.sample_rate_hz)

    fits = []
    if config.fitting.enabled:
        with _stage("fit"):
            fits, fit_warnings = fit_all(sample_sets, config.fitting, config.seed)
        warnings.extend(fit_warnings)

    summaries: dict[str, SampleSummary] = {}
    for name, s in sample_sets.items():
        if len(s) >= 2:
            summaries[name] = summarize(s)

    mean_speed = inclination = None
    if tracking is not None and len(tracking.samples):
        mean_speed = float(tracking.samples.magnitude.mean())
        inclination = inclination_angle(
            float(tracking.samples.vx.mean()), -float(tracking.samples.vy.mean())
        )

    export = config.export
    with _stage("export"):
        manifest = Manifest(
            software_version=__version__,
            config=config.model_dump(mode="json"),
            config_sha256=config.sha256(),
            seed=config.seed,
            resolution_px_per_cm=meta.resolution_px_per_cm,
            sample_rate_hz=meta.sample_rate_hz,
            timesteps=len(frames),
            input_checksums=_checksums(input_dir, config, frames),
        )
        bundle = DatasetBundle(
            labels=labels if export.labels else [],
            boundaries=[r.boundary for r in results] if export.boundaries else [],
            velocity=tracking.samples if tracking is not None and export.velocity else None,
            displacements=(
                tracking.fields if tracking is not None and export.displacements else None
            ),
            fits=fits if config.fitting.enabled and export.fits else None,
            manifest=manifest,
        )
        if export.overlays:
            bundle.overlays = _overlays(frames, results, tracking, sample_sets, fits, config)
        if out_dir is not None:
            write_bundle(bundle, out_dir)

    report = RunReport(
        frames=len(frames),
        regions_per_frame=[r.regions for r in results],
        pair_counts=tracking.pair_counts if tracking is not None else [],
        match_rate=tracking.match_rate if tracking is not None else None,
        mean_speed=mean_speed,
        inclination_deg=inclination,
        summaries=summaries,
        fits=fits,
        warnings=warnings,
        output_dir=str(out_dir) if out_dir is not None else None,
    )
    return bundle, report


def advise(
    config: PipelineConfig,
    input_dir: str | Path,
    rates: Sequence[float],
    threads: int = 1,
) -> SamplingReport:
    """
    Track the sequence at each candidate rate and tabulate u_obs = max |v|
    against u_max. Rates <= 0 produce a degenerate row without a tracking pass.
    """
    input_dir = Path(input_dir)
    u_obs: list[float] = []
    longitudinal: list[np.ndarray] = []
    for f in rates:
        if f <= 0:
            u_obs.append(0.0)
            longitudinal.append(np.empty(0))
            continue
        try:
            meta = SequenceMeta.model_validate(
                {**config.sequence.model_dump(), "sample_rate_hz": f}
            )
        except ValidationError as exc:
            raise ConfigError(f"rate {f} Hz is not usable: {exc.errors()[0]['msg']}") from exc
        rated = config.model_copy(update={"sequence": meta})
        frames = _load(rated, input_dir)
        results = _process_frames(rated, frames, threads)
        samples = _track(rated, results, threads).samples
        u_obs.append(float(samples.magnitude.max()) if len(samples) else 0.0)
        longitudinal.append(samples.longitudinal)
        logger.info(f"Rate {f} Hz: {len(samples)} samples, u_obs {u_obs[-1]:.4g} cm/s")
    return sampling_advisor(config.sequence, rates, u_obs, longitudinal)


def _fmt(value: float | None, spec: str = ".4g") -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    return format(value, spec)


def format_report(report: RunReport) -> str:
    lines = [f"Frames processed: {report.frames}"]
    if report.regions_per_frame:
        counts = report.regions_per_frame
        lines.append(f"Regions per frame: min {min(counts)}, max {max(counts)}")
    if report.pair_counts:
        matched = sum(p.matched for p in report.pair_counts)
        lines.append(
            f"Frame pairs: {len(report.pair_counts)}, matched points {matched}, "
            f"match rate {_fmt(report.match_rate, '.3f')}"
        )
    lines.append(f"Mean speed: {_fmt(report.mean_speed)} cm/s")
    if report.inclination_deg is not None:
        lines.append(f"Inclination: {report.inclination_deg:.2f} deg")

    if report.summaries:
        lines.append("")
        lines.append(f"{'sample':<24}{'n':>8}{'mean':>12}{'sd':>12}{'min':>12}{'max':>12}")
        for name, s in report.summaries.items():
            lines.append(
                f"{name:<24}{s.n:>8}{s.mean:>12.4g}{s.sd:>12.4g}{s.min:>12.4g}{s.max:>12.4g}"
            )

    if report.fits:
        lines.append("")
        for fit in report.fits:
            line = (
                f"{fit.sample} ~ {fit.family} [{fit.method}]: lambda={fit.lam:.4g}, "
                f"k={fit.k}, nrmse={fit.nrmse:.4g}"
            )
            if fit.credible and "lambda" in fit.credible:
                lo, hi = fit.credible["lambda"]
                line += f", 95% CI [{lo:.4g}, {hi:.4g}]"
            lines.append(line)

    if report.warnings:
        lines.append("")
        lines.append(f"Warnings ({len(report.warnings)}):")
        lines.extend(f"  - {w}" for w in report.warnings)
    if report.output_dir:
        lines.append("")
        lines.append(f"Output: {report.output_dir}")
    return "\n".join(lines)
