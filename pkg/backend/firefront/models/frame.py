"""In-memory frame types."""

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

FrameKind = Literal["visual", "infrared"]


@dataclass(frozen=True, eq=False)
class Frame:
    """One timestamped image.

    Visual pixels are uint8 RGB of shape (H, W, 3); infrared pixels are a
    float64 temperature grid of shape (H, W).
    """

    index: int
    timestamp_s: float
    kind: FrameKind
    pixels: np.ndarray

    def __post_init__(self) -> None:
        expected_ndim = 3 if self.kind == "visual" else 2
        if self.pixels.ndim != expected_ndim:
            raise ValueError(
                f"{self.kind} frame needs a {expected_ndim}-D pixel grid, got {self.pixels.shape}"
            )
        if self.kind == "visual" and self.pixels.shape[2] != 3:
            raise ValueError(f"visual frame needs 3 channels, got {self.pixels.shape[2]}")

    @property
    def height_px(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width_px(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height_px, self.width_px

    def with_pixels(self, pixels: np.ndarray) -> "Frame":
        return Frame(index=self.index, timestamp_s=self.timestamp_s, kind=self.kind, pixels=pixels)


class HsvPixel(NamedTuple):
    h: float  # degrees in [0, 360)
    s: float
    v: float
