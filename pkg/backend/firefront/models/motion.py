"""Displacement and velocity containers."""

from dataclasses import dataclass, field

import numpy as np

from firefront.schemas.results import PairCount


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """Matched boundary points between two sampled frames.

    Row i pairs src[i] (frame t) with dst[i] (frame t+1); d = dst - src.
    """

    src: np.ndarray  # int (M, 2) (x, y)
    dst: np.ndarray  # int (M, 2)
    dt_s: float
    region: np.ndarray  # int (M,), source region id or -1
    unmatched: int = 0
    t_index: int = 0

    def __post_init__(self) -> None:
        if self.dt_s <= 0:
            raise ValueError(f"dt_s must be > 0, got {self.dt_s}")

    @property
    def d(self) -> np.ndarray:
        return self.dst - self.src

    def __len__(self) -> int:
        return int(self.src.shape[0])


@dataclass(frozen=True, eq=False)
class VelocitySamples:
    """Struct-of-arrays velocity samples in cm/s."""

    vx: np.ndarray
    vy: np.ndarray
    longitudinal: np.ndarray
    transverse: np.ndarray
    t_index: np.ndarray
    region: np.ndarray
    src: np.ndarray  # (N, 2) source pixel of each sample

    @property
    def magnitude(self) -> np.ndarray:
        return np.hypot(self.vx, self.vy)

    def positive_longitudinal(self) -> np.ndarray:
        return self.longitudinal[self.longitudinal > 0]

    def __len__(self) -> int:
        return int(self.vx.size)

    @classmethod
    def empty(cls) -> "VelocitySamples":
        f = np.empty(0, dtype=np.float64)
        i = np.empty(0, dtype=np.int64)
        return cls(f, f, f, f, i, i, np.empty((0, 2), dtype=np.int64))

    @classmethod
    def concat(cls, parts: list["VelocitySamples"]) -> "VelocitySamples":
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty()
        return cls(
            vx=np.concatenate([p.vx for p in parts]),
            vy=np.concatenate([p.vy for p in parts]),
            longitudinal=np.concatenate([p.longitudinal for p in parts]),
            transverse=np.concatenate([p.transverse for p in parts]),
            t_index=np.concatenate([p.t_index for p in parts]),
            region=np.concatenate([p.region for p in parts]),
            src=np.concatenate([p.src for p in parts]),
        )


@dataclass(frozen=True, eq=False)
class TrackingResult:
    samples: VelocitySamples
    pair_counts: list[PairCount]
    warnings: list[str] = field(default_factory=list)
    fields: list[DisplacementField] = field(default_factory=list)

    @property
    def match_rate(self) -> float | None:
        total = sum(p.src_points for p in self.pair_counts)
        if total == 0:
            return None
        return sum(p.matched for p in self.pair_counts) / total
