"""Export service layer: label composition, burn times and the on-disk dataset bundle."""

import json
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np
import pandas as pd

from firefront.errors import DimensionMismatchError, EmptyInputError, ExportError, LoadError
from firefront.models import (
    CLASS_CODES,
    LABEL_PRECEDENCE,
    BinaryMask,
    DisplacementField,
    LabelCode,
    LabelGrid,
    SampleSet,
    VelocitySamples,
)
from firefront.schemas.results import FitResult, Manifest

__all__ = [
    "BOUNDARY_COLUMNS",
    "VELOCITY_COLUMNS",
    "DISPLACEMENT_COLUMNS",
    "DatasetBundle",
    "compose_labels",
    "burn_time_per_pixel",
    "burn_time_grid",
    "velocity_table",
    "displacement_table",
    "write_bundle",
    "read_bundle",
]

logger = logging.getLogger(__name__)

BOUNDARY_COLUMNS = ["region_id", "x", "y"]
VELOCITY_COLUMNS = ["t", "region", "sx", "sy", "vx", "vy", "longitudinal", "transverse"]
DISPLACEMENT_COLUMNS = ["t", "region", "sx", "sy", "dx", "dy"]
MANIFEST_NAME = "manifest.json"


@dataclass(eq=False)
class DatasetBundle:
    """Everything one run exports.

    boundaries holds one int (N, 3) array of (region_id, x, y) rows per
    timestep. displacements holds the matched pixel pairs of every frame
    pair. velocity, displacements and fits set to None are left out of the
    bundle.
    overlays maps a relative PNG path to an RGB image and is not part of the
    round trip.
    """

    labels: list[LabelGrid]
    boundaries: list[np.ndarray]
    velocity: VelocitySamples | None
    fits: list[FitResult] | None
    manifest: Manifest
    displacements: list[DisplacementField] | None = None
    overlays: dict[str, np.ndarray] = field(default_factory=dict)


def compose_labels(
    masks: dict[str, BinaryMask], shape: tuple[int, int] | None = None
) -> LabelGrid:
    """
    Merge per-class masks into one label grid.

    Overlaps resolve burning > burned_cooling > smoke > undisturbed. Masks
    for labels without a code (e.g. preheated) do not reach the grid.
    """
    shapes = {m.shape for m in masks.values()}
    if shape is not None:
        shapes.add(tuple(shape))
    if len(shapes) > 1:
        raise DimensionMismatchError(f"class masks disagree on shape: {sorted(shapes)}")
    if not shapes:
        raise ValueError("compose_labels needs at least one mask or an explicit shape")

    grid = np.full(shapes.pop(), LabelCode.UNDISTURBED, dtype=np.uint8)
    for label in reversed(LABEL_PRECEDENCE):
        mask = masks.get(label)
        if mask is not None:
            grid[mask] = CLASS_CODES[label]
    return grid


def _burn_counts(labels: list[LabelGrid]) -> np.ndarray:
    if not labels:
        raise EmptyInputError("burn time needs at least one label grid")
    stack = np.stack(labels)
    return (stack == LabelCode.BURNING).sum(axis=0)


def burn_time_per_pixel(labels: list[LabelGrid], f_s: float) -> SampleSet:
    """Seconds each pixel spent burning; never-burning pixels are excluded."""
    counts = _burn_counts(labels)
    values = counts[counts > 0].astype(np.float64) / f_s
    return SampleSet(values, unit="s", name="burn_time")


def burn_time_grid(labels: list[LabelGrid], f_s: float) -> np.ndarray:
    """Per-pixel burn time in seconds, NaN where a pixel never burned."""
    counts = _burn_counts(labels).astype(np.float64)
    grid = counts / f_s
    grid[counts == 0] = np.nan
    return grid


def velocity_table(velocity: VelocitySamples) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": velocity.t_index.astype(np.int64),
            "region": velocity.region.astype(np.int64),
            "sx": velocity.src[:, 0].astype(np.int64),
            "sy": velocity.src[:, 1].astype(np.int64),
            "vx": velocity.vx,
            "vy": velocity.vy,
            "longitudinal": velocity.longitudinal,
            "transverse": velocity.transverse,
        },
        columns=VELOCITY_COLUMNS,
    )


def displacement_table(fields: list[DisplacementField]) -> pd.DataFrame:
    """One row per matched pair: frame-pair index, source region, source pixel and shift in px."""
    rows = [
        pd.DataFrame(
            {
                "t": np.full(len(fld), fld.t_index, dtype=np.int64),
                "region": fld.region.astype(np.int64),
                "sx": fld.src[:, 0].astype(np.int64),
                "sy": fld.src[:, 1].astype(np.int64),
                "dx": fld.d[:, 0].astype(np.int64),
                "dy": fld.d[:, 1].astype(np.int64),
            },
            columns=DISPLACEMENT_COLUMNS,
        )
        for fld in fields
        if len(fld)
    ]
    if not rows:
        return pd.DataFrame({c: pd.Series(dtype=np.int64) for c in DISPLACEMENT_COLUMNS})
    return pd.concat(rows, ignore_index=True)


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _write_members(bundle: DatasetBundle, root: Path) -> list[str]:
    written: list[str] = []

    if bundle.labels:
        (root / "labels").mkdir()
        for t, grid in enumerate(bundle.labels):
            rel = f"labels/t{t:06d}.csv"
            pd.DataFrame(grid).to_csv(root / rel, header=False, index=False)
            written.append(rel)
        rel = "burn_time.csv"
        grid = burn_time_grid(bundle.labels, bundle.manifest.sample_rate_hz)
        pd.DataFrame(grid).to_csv(root / rel, header=False, index=False, na_rep="nan")
        written.append(rel)

    if bundle.boundaries:
        (root / "boundaries").mkdir()
        for t, rows in enumerate(bundle.boundaries):
            rel = f"boundaries/t{t:06d}.csv"
            table = pd.DataFrame(np.asarray(rows, dtype=np.int64).reshape(-1, 3))
            table.columns = BOUNDARY_COLUMNS
            table.to_csv(root / rel, index=False)
            written.append(rel)

    if bundle.velocity is not None:
        velocity_table(bundle.velocity).to_csv(root / "velocity.csv", index=False)
        written.append("velocity.csv")

    if bundle.displacements is not None:
        displacement_table(bundle.displacements).to_csv(root / "displacements.csv", index=False)
        written.append("displacements.csv")

    if bundle.fits is not None:
        _write_json(
            root / "fits.json",
            [fit.model_dump(mode="json", by_alias=True) for fit in bundle.fits],
        )
        written.append("fits.json")

    if bundle.overlays:
        for rel, image in sorted(bundle.overlays.items()):
            path = root / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            if not cv2.imwrite(str(path), cv2.cvtColor(image, cv2.COLOR_RGB2BGR)):
                raise ExportError(path, "image encoder refused the path")
            written.append(rel)
    return sorted(written)


def write_bundle(bundle: DatasetBundle, out_dir: str | Path) -> Path:
    """
    Write the bundle and return the manifest path.

    Members are written into a sibling staging directory that is renamed
    into place only after manifest.json, so a failed write leaves nothing
    behind. An existing out_dir is replaced.
    """
    out_dir = Path(out_dir)
    parent = out_dir.parent
    try:
        parent.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(dir=parent, prefix=f".{out_dir.name}.staging-"))
    except OSError as exc:
        raise ExportError(out_dir, exc.strerror or str(exc)) from exc

    try:
        files = _write_members(bundle, staging)
        manifest = bundle.manifest.model_copy(update={"files": files})
        _write_json(staging / MANIFEST_NAME, manifest.model_dump(mode="json"))

        if out_dir.exists():
            retired = Path(tempfile.mkdtemp(dir=parent, prefix=f".{out_dir.name}.old-"))
            os.replace(out_dir, retired / out_dir.name)
            os.replace(staging, out_dir)
            shutil.rmtree(retired, ignore_errors=True)
        else:
            os.replace(staging, out_dir)
    except OSError as exc:
        shutil.rmtree(staging, ignore_errors=True)
        raise ExportError(getattr(exc, "filename", None) or out_dir, str(exc)) from exc
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise

    bundle.manifest = manifest
    logger.info(f"Wrote bundle {out_dir} ({len(files)} files, {manifest.timesteps} timesteps)")
    return out_dir / MANIFEST_NAME


def _read_csv(path: Path, **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision="round_trip", **kwargs)
    except (OSError, ValueError, pd.errors.ParserError) as exc:
        raise LoadError(path, str(exc)) from exc


def _displacement_fields(table: pd.DataFrame, pairs: int, dt_s: float) -> list[DisplacementField]:
    # Unmatched counts are not stored
    fields = []
    for t in range(pairs):
        rows = table[table["t"] == t]
        src = rows[["sx", "sy"]].to_numpy(dtype=np.int64).reshape(-1, 2)
        d = rows[["dx", "dy"]].to_numpy(dtype=np.int64).reshape(-1, 2)
        fields.append(
            DisplacementField(
                src=src,
                dst=src + d,
                dt_s=dt_s,
                region=rows["region"].to_numpy(dtype=np.int64),
                t_index=t,
            )
        )
    return fields


def read_bundle(out_dir: str | Path) -> DatasetBundle:
    """Load a bundle written by write_bundle (overlays are not read back)."""
    out_dir = Path(out_dir)
    manifest_path = out_dir / MANIFEST_NAME
    try:
        manifest = Manifest.model_validate_json(manifest_path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise LoadError(manifest_path, str(exc)) from exc

    label_files = sorted(f for f in manifest.files if f.startswith("labels/"))
    labels = [
        _read_csv(out_dir / rel, header=None).to_numpy(dtype=np.uint8) for rel in label_files
    ]
    boundary_files = sorted(f for f in manifest.files if f.startswith("boundaries/"))
    boundaries = [
        _read_csv(out_dir / rel)[BOUNDARY_COLUMNS].to_numpy(dtype=np.int64)
        for rel in boundary_files
    ]

    velocity = None
    if "velocity.csv" in manifest.files:
        table = _read_csv(out_dir / "velocity.csv")
        velocity = VelocitySamples(
            vx=table["vx"].to_numpy(dtype=np.float64),
            vy=table["vy"].to_numpy(dtype=np.float64),
            longitudinal=table["longitudinal"].to_numpy(dtype=np.float64),
            transverse=table["transverse"].to_numpy(dtype=np.float64),
            t_index=table["t"].to_numpy(dtype=np.int64),
            region=table["region"].to_numpy(dtype=np.int64),
            src=table[["sx", "sy"]].to_numpy(dtype=np.int64).reshape(-1, 2),
        )

    displacements = None
    if "displacements.csv" in manifest.files:
        table = _read_csv(out_dir / "displacements.csv")
        displacements = _displacement_fields(
            table, manifest.timesteps - 1, 1.0 / manifest.sample_rate_hz
        )

    fits = None
    if "fits.json" in manifest.files:
        fits_path = out_dir / "fits.json"
        try:
            fits_raw = json.loads(fits_path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise LoadError(fits_path, str(exc)) from exc
        fits = [FitResult.model_validate(raw) for raw in fits_raw]
    return DatasetBundle(
        labels=labels,
        boundaries=boundaries,
        velocity=velocity,
        fits=fits,
        manifest=manifest,
        displacements=displacements,
    )
