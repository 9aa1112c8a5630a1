"""Pydantic schemas for the run configuration document."""

import hashlib
import json
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Channel = Annotated[int, Field(ge=0, le=255)]
Unit = Annotated[float, Field(ge=0.0, le=1.0)]
Hue = Annotated[float, Field(ge=0.0, le=360.0)]

FrameKind = Literal["visual", "infrared"]
ClassLabel = Literal["burning", "burned_cooling", "smoke"]
ThermalLabel = Literal["burning", "burned_cooling", "preheated"]
TrackLabel = Literal["burning", "burned_cooling", "smoke", "preheated"]
FamilyName = Literal["exponential", "erlang"]
MethodName = Literal["moment_matching", "mcmc"]
SampleName = Literal[
    "longitudinal_positive", "longitudinal", "transverse", "magnitude", "burn_time"
]

STRIDE_TOLERANCE = 1e-9


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --- Sequence Schemas ---


class Roi(_Strict):
    """Axis-aligned rectangle in pixel coordinates (x right, y down)."""

    x: int = Field(ge=0)
    y: int = Field(ge=0)
    width: int = Field(gt=0)
    height: int = Field(gt=0)

    @property
    def x_end(self) -> int:
        return self.x + self.width

    @property
    def y_end(self) -> int:
        return self.y + self.height

    def fits(self, width_px: int, height_px: int) -> bool:
        return self.x_end <= width_px and self.y_end <= height_px


class SequenceMeta(_Strict):
    """Spatial and temporal metadata of one frame sequence."""

    kind: FrameKind = "visual"
    frame_rate_hz: float = Field(default=30.0, gt=0)
    sample_rate_hz: float = Field(default=2.0, gt=0)
    resolution_px_per_cm: float = Field(default=1.27, gt=0)
    fov_px: int = Field(default=253, gt=0)
    roi: Roi | None = None
    max_duration_s: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_stride(self) -> "SequenceMeta":
        if self.sample_rate_hz > self.frame_rate_hz:
            raise ValueError(
                f"sample_rate_hz {self.sample_rate_hz} exceeds frame_rate_hz {self.frame_rate_hz}"
            )
        ratio = self.frame_rate_hz / self.sample_rate_hz
        if abs(ratio - round(ratio)) >= STRIDE_TOLERANCE:
            raise ValueError(
                f"frame_rate_hz / sample_rate_hz = {ratio:.6g} is not an integer frame stride"
            )
        return self

    @property
    def stride(self) -> int:
        return round(self.frame_rate_hz / self.sample_rate_hz)

    @property
    def dt_s(self) -> float:
        return 1.0 / self.sample_rate_hz


# --- Segmentation Schemas ---


class ColorThresholds(_Strict):
    """Inclusive RGB and HSV boxes; the hue interval wraps through 360 when h_lo > h_hi."""

    rgb_lo: tuple[Channel, Channel, Channel] = (0, 0, 0)
    rgb_hi: tuple[Channel, Channel, Channel] = (255, 255, 255)
    hsv_lo: tuple[Hue, Unit, Unit] = (0.0, 0.0, 0.0)
    hsv_hi: tuple[Hue, Unit, Unit] = (360.0, 1.0, 1.0)

    @model_validator(mode="after")
    def _check_order(self) -> "ColorThresholds":
        for lo, hi in zip(self.rgb_lo, self.rgb_hi, strict=True):
            if lo > hi:
                raise ValueError(f"rgb_lo {self.rgb_lo} exceeds rgb_hi {self.rgb_hi}")
        for lo, hi in zip(self.hsv_lo[1:], self.hsv_hi[1:], strict=True):
            if lo > hi:
                raise ValueError(f"hsv_lo {self.hsv_lo} exceeds hsv_hi {self.hsv_hi} in s/v")
        return self

    @property
    def hue_wraps(self) -> bool:
        return self.hsv_lo[0] > self.hsv_hi[0]


class ThermalBand(_Strict):
    """Half-open temperature interval [t_lo, t_hi) carrying a class label."""

    label: ThermalLabel
    t_lo: float
    t_hi: float

    @model_validator(mode="after")
    def _check_interval(self) -> "ThermalBand":
        if not self.t_lo < self.t_hi:
            raise ValueError(f"band {self.label}: t_lo {self.t_lo} must be < t_hi {self.t_hi}")
        return self


class ThermalBands(_Strict):
    """Ascending, pairwise-disjoint temperature bands."""

    bands: list[ThermalBand] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_disjoint(self) -> "ThermalBands":
        labels = [band.label for band in self.bands]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate thermal band labels: {labels}")
        for lower, upper in zip(self.bands, self.bands[1:], strict=False):
            if upper.t_lo < lower.t_hi:
                raise ValueError(
                    f"thermal bands {lower.label} and {upper.label} overlap or are not ascending"
                )
        return self

    def labels(self) -> list[str]:
        return [band.label for band in self.bands]


# Defaults match the synthetic palette: saturated orange fire, dark char, gray smoke.
DEFAULT_VISUAL_THRESHOLDS: dict[str, ColorThresholds] = {
    "burning": ColorThresholds(
        rgb_lo=(200, 60, 0), rgb_hi=(255, 210, 90), hsv_lo=(10.0, 0.6, 0.7), hsv_hi=(50.0, 1.0, 1.0)
    ),
    "burned_cooling": ColorThresholds(
        rgb_lo=(0, 0, 0), rgb_hi=(80, 70, 70), hsv_lo=(0.0, 0.0, 0.0), hsv_hi=(360.0, 0.6, 0.35)
    ),
    "smoke": ColorThresholds(
        rgb_lo=(120, 120, 120),
        rgb_hi=(235, 235, 235),
        hsv_lo=(0.0, 0.0, 0.45),
        hsv_hi=(360.0, 0.12, 0.95),
    ),
}

DEFAULT_THERMAL_BANDS = ThermalBands(
    bands=[
        ThermalBand(label="burned_cooling", t_lo=50.0, t_hi=200.0),
        ThermalBand(label="preheated", t_lo=200.0, t_hi=350.0),
        ThermalBand(label="burning", t_lo=350.0, t_hi=5000.0),
    ]
)


class SegmentationConfig(_Strict):
    visual: dict[ClassLabel, ColorThresholds] = Field(
        default_factory=lambda: dict(DEFAULT_VISUAL_THRESHOLDS)
    )
    # Second threshold pass applied to the tracked class only
    refine: ColorThresholds | None = None
    thermal: ThermalBands = DEFAULT_THERMAL_BANDS
    track_label: TrackLabel = "burning"


# --- Cleaning / Clustering / Boundary Schemas ---


class CleaningLevel(_Strict):
    radius: int = Field(gt=0)
    min_neighbors: int = Field(gt=0)

    @model_validator(mode="after")
    def _check_reachable(self) -> "CleaningLevel":
        most = (2 * self.radius + 1) ** 2 - 1
        if self.min_neighbors > most:
            raise ValueError(
                f"min_neighbors {self.min_neighbors} exceeds the {most} neighbors "
                f"of radius {self.radius}"
            )
        return self


class CleaningSchedule(_Strict):
    """Coarse-to-fine neighbor-count filter levels."""

    levels: list[CleaningLevel] = Field(
        default_factory=lambda: [
            CleaningLevel(radius=8, min_neighbors=60),
            CleaningLevel(radius=3, min_neighbors=8),
            CleaningLevel(radius=1, min_neighbors=2),
        ],
        min_length=1,
    )

    @model_validator(mode="after")
    def _check_decreasing(self) -> "CleaningSchedule":
        radii = [level.radius for level in self.levels]
        if any(a <= b for a, b in zip(radii, radii[1:], strict=False)):
            raise ValueError(f"cleaning radii must be strictly decreasing, got {radii}")
        return self

    @classmethod
    def from_pairs(cls, pairs: list[tuple[int, int]]) -> "CleaningSchedule":
        return cls(levels=[CleaningLevel(radius=r, min_neighbors=m) for r, m in pairs])


class ClusteringConfig(_Strict):
    enabled: bool = True
    eps: float = Field(default=20.0, gt=0)
    min_pts: int = Field(default=10, ge=1)


class BoundaryConfig(_Strict):
    alpha: float = Field(default=1.0 / 3.0, ge=0)


class TrackingConfig(_Strict):
    enabled: bool = True
    # None -> FOV/2 px, the largest displacement the sampling rate can resolve
    max_dist_px: float | None = Field(default=None, gt=0)
    axis_deg: float = 0.0


# --- Fitting Schemas ---


class McmcConfig(_Strict):
    chains: int = Field(default=4, ge=2)
    iterations: int = Field(default=20_000, ge=100)
    burn_in_fraction: float = Field(default=0.5, gt=0, lt=1)
    target_acceptance: float = Field(default=0.35, gt=0, lt=1)
    adapt_interval: int = Field(default=100, ge=10)
    k_max: int = Field(default=50, ge=1)
    rhat_max: float = Field(default=1.05, gt=1)
    min_kept_samples: int = Field(default=10_000, ge=1)

    @property
    def burn_in(self) -> int:
        return int(self.iterations * self.burn_in_fraction)

    @property
    def kept_per_chain(self) -> int:
        return self.iterations - self.burn_in

    @model_validator(mode="after")
    def _check_length(self) -> "McmcConfig":
        kept = self.kept_per_chain * self.chains
        if kept < self.min_kept_samples:
            raise ValueError(
                f"{kept} post burn-in draws across chains is below min_kept_samples "
                f"{self.min_kept_samples}"
            )
        return self


class FitTarget(_Strict):
    sample: SampleName
    family: FamilyName


class FittingConfig(_Strict):
    enabled: bool = True
    targets: list[FitTarget] = Field(
        default_factory=lambda: [
            FitTarget(sample="longitudinal_positive", family="exponential"),
            FitTarget(sample="burn_time", family="erlang"),
        ]
    )
    methods: list[MethodName] = Field(default_factory=lambda: ["moment_matching", "mcmc"])
    bins: int | None = Field(default=None, ge=2)
    mcmc: McmcConfig = McmcConfig()


# --- Inpaint / Export Schemas ---


class InpaintConfig(_Strict):
    enabled: bool = False
    mode: Literal["harmonic", "transport"] = "harmonic"
    mask_path: str | None = None
    auto: ColorThresholds | None = None
    auto_band: tuple[float, float] | None = None
    max_iters: int = Field(default=5000, ge=1)
    tol: float = Field(default=1e-4, gt=0)
    dt: float = Field(default=0.1, gt=0, le=0.25)

    @model_validator(mode="after")
    def _check_source(self) -> "InpaintConfig":
        sources = [s for s in (self.mask_path, self.auto, self.auto_band) if s is not None]
        if self.enabled and len(sources) != 1:
            raise ValueError("inpaint needs exactly one of mask_path, auto, auto_band")
        if self.auto_band is not None and not self.auto_band[0] < self.auto_band[1]:
            raise ValueError(f"auto_band {self.auto_band} must satisfy lo < hi")
        return self


class ExportConfig(_Strict):
    labels: bool = True
    boundaries: bool = True
    velocity: bool = True
    displacements: bool = True
    fits: bool = True
    overlays: bool = False


class PipelineConfig(_Strict):
    """The single document that drives a run."""

    sequence: SequenceMeta = SequenceMeta()
    segmentation: SegmentationConfig = SegmentationConfig()
    cleaning: CleaningSchedule = CleaningSchedule()
    clustering: ClusteringConfig = ClusteringConfig()
    boundary: BoundaryConfig = BoundaryConfig()
    tracking: TrackingConfig = TrackingConfig()
    fitting: FittingConfig = FittingConfig()
    inpaint: InpaintConfig = InpaintConfig()
    export: ExportConfig = ExportConfig()
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_cross_module(self) -> "PipelineConfig":
        seg = self.segmentation
        if self.sequence.kind == "visual":
            if seg.track_label not in seg.visual:
                raise ValueError(f"no visual thresholds for track_label '{seg.track_label}'")
            if self.inpaint.auto_band is not None:
                raise ValueError("auto_band occlusion applies to infrared sequences only")
        else:
            if seg.track_label not in seg.thermal.labels():
                raise ValueError(f"no thermal band for track_label '{seg.track_label}'")
            if self.inpaint.auto is not None:
                raise ValueError("color occlusion thresholds apply to visual sequences only")
        return self

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
