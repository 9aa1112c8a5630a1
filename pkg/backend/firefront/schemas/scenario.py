"""Pydantic schema for synthetic scenarios."""

from typing import Literal

from pydantic import Field, model_validator

from firefront.schemas.config import FrameKind, Roi, _Strict

ScenarioKind = Literal[
    "expanding_disk", "translating_front", "ring_fire", "two_flanks", "advected_plume"
]


class Scenario(_Strict):
    """Synthetic sequence with an analytically known front.

    Speeds are in px per rendered frame. burn_duration_frames=None means
    ignited pixels keep burning until the end of the sequence.
    """

    kind: ScenarioKind
    width: int = Field(default=256, ge=16)
    height: int = Field(default=256, ge=16)
    frames: int = Field(default=20, ge=2)
    seed: int = Field(default=0, ge=0)
    # Salt noise: fraction of pixels painted fire-colored (or fire-hot) per frame
    noise: float = Field(default=0.0, ge=0.0, le=1.0)

    center: tuple[float, float] | None = None
    radius0: float = Field(default=10.0, ge=0.0)
    speed_px_per_frame: float = Field(default=2.0, ge=0.0)
    burn_duration_frames: int | None = Field(default=None, ge=1)
    front_x0: float = 20.0
    separation: float = Field(default=60.0, gt=0.0)
    bow: float = Field(default=0.0, ge=0.0)
    plume_velocity: tuple[float, float] = (1.74, 6.0)
    plume_radius: float = Field(default=40.0, gt=0.0)

    occlusions: list[Roi] = Field(default_factory=list)
    frame_rate_hz: float = Field(default=30.0, gt=0)
    resolution_px_per_cm: float = Field(default=1.27, gt=0)
    modality: FrameKind = "visual"
    preheat_px: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_modality(self) -> "Scenario":
        if self.kind == "advected_plume" and self.modality != "visual":
            raise ValueError("advected_plume renders visual frames only")
        if self.preheat_px > 0 and self.modality != "infrared":
            raise ValueError("preheat_px applies to infrared scenarios only")
        return self

    @property
    def center_xy(self) -> tuple[float, float]:
        if self.center is not None:
            return self.center
        return (self.width - 1) / 2.0, (self.height - 1) / 2.0
