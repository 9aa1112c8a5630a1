"""Tracking service layer: greedy nearest-neighbor matching and velocity conversion."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial import cKDTree

from firefront.errors import InsufficientSequenceError
from firefront.models import DisplacementField, TrackingResult, VelocitySamples
from firefront.schemas.config import SequenceMeta
from firefront.schemas.results import PairCount

__all__ = [
    "FrameBoundary",
    "greedy_match",
    "to_velocities",
    "track_sequence",
    "default_max_dist_px",
]

logger = logging.getLogger(__name__)

# Pooled boundary points of one frame: (points (N, 2) as (x, y), region ids (N,))
FrameBoundary = tuple[np.ndarray, np.ndarray]


def default_max_dist_px(meta: SequenceMeta) -> float:
    """
    u_max * dt * RES, i.e. FOV / 2 pixels: the largest per-frame jump the
    sampling rate can resolve.
    """
    u_max = meta.sample_rate_hz / 2.0 * meta.fov_px / meta.resolution_px_per_cm
    return u_max * meta.dt_s * meta.resolution_px_per_cm


def _empty_field(dt_s: float, unmatched: int, t_index: int) -> DisplacementField:
    empty = np.empty((0, 2), dtype=np.int64)
    return DisplacementField(
        src=empty,
        dst=empty.copy(),
        dt_s=dt_s,
        region=np.empty(0, dtype=np.int64),
        unmatched=unmatched,
        t_index=t_index,
    )


def greedy_match(
    src_boundary,
    dst_boundary,
    max_dist_px: float,
    dt_s: float = 1.0,
    src_regions: np.ndarray | None = None,
    t_index: int = 0,
) -> DisplacementField:
    """
    Pair every src point with its Euclidean-nearest dst point within max_dist_px.

    Many src points may share one dst point. Equidistant dst candidates are
    resolved to the lowest (y, x). Src points with nothing in range stay
    unmatched and are only counted.
    """
    if max_dist_px <= 0:
        raise ValueError(f"max_dist_px must be > 0, got {max_dist_px}")
    src = np.asarray(src_boundary, dtype=np.int64).reshape(-1, 2)
    dst = np.asarray(dst_boundary, dtype=np.int64).reshape(-1, 2)
    if not len(src) or not len(dst):
        logger.warning(
            f"Frame pair {t_index}: empty boundary (src {len(src)}, dst {len(dst)}), no matches"
        )
        return _empty_field(dt_s, unmatched=len(src), t_index=t_index)

    tree = cKDTree(dst)
    dist, nearest = tree.query(src, k=1)
    in_range = dist <= max_dist_px

    # Exact squared distances decide ties; candidates come from a slightly padded ball
    best = nearest.copy()
    nearest_d2 = ((dst[nearest] - src) ** 2).sum(axis=1)
    matched_idx = np.flatnonzero(in_range)
    candidates = (
        tree.query_ball_point(src[matched_idx], r=dist[matched_idx] + 1e-6)
        if len(matched_idx)
        else []
    )
    for i, cand in zip(matched_idx, candidates, strict=True):
        if len(cand) < 2:
            continue
        cand = np.asarray(cand)
        d2 = ((dst[cand] - src[i]) ** 2).sum(axis=1)
        tied = cand[d2 == min(int(d2.min()), int(nearest_d2[i]))]
        best[i] = tied[np.lexsort((dst[tied, 0], dst[tied, 1]))[0]]

    regions = (
        np.full(len(src), -1, dtype=np.int64)
        if src_regions is None
        else np.asarray(src_regions, dtype=np.int64)
    )
    return DisplacementField(
        src=src[in_range],
        dst=dst[best[in_range]],
        dt_s=dt_s,
        region=regions[in_range],
        unmatched=int((~in_range).sum()),
        t_index=t_index,
    )


def to_velocities(
    field: DisplacementField, res_px_per_cm: float, axis_deg: float = 0.0
) -> VelocitySamples:
    """
    Convert displacements to cm/s: v = d / RES / dt.

    Longitudinal is the projection onto axis_deg (measured in image axes,
    from +x toward +y); transverse is the orthogonal component.
    """
    if res_px_per_cm <= 0:
        raise ValueError(f"resolution must be > 0, got {res_px_per_cm}")
    d = field.d.astype(np.float64)
    vx = d[:, 0] / res_px_per_cm / field.dt_s
    vy = d[:, 1] / res_px_per_cm / field.dt_s
    theta = np.deg2rad(axis_deg)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    return VelocitySamples(
        vx=vx,
        vy=vy,
        longitudinal=vx * cos_t + vy * sin_t,
        transverse=-vx * sin_t + vy * cos_t,
        t_index=np.full(len(field), field.t_index, dtype=np.int64),
        region=field.region.copy(),
        src=field.src.copy(),
    )


def track_sequence(
    boundaries: list[FrameBoundary],
    res_px_per_cm: float,
    sample_rate_hz: float,
    axis_deg: float = 0.0,
    max_dist_px: float | None = None,
    threads: int = 1,
) -> TrackingResult:
    """
    Match every consecutive frame pair and pool the velocity samples.

    With max_dist_px unset, matching is unbounded.
    """
    if len(boundaries) < 2:
        raise InsufficientSequenceError(
            f"Tracking needs >= 2 frames with boundaries, got {len(boundaries)}"
        )
    dt_s = 1.0 / sample_rate_hz
    limit = np.inf if max_dist_px is None else max_dist_px

    def match_pair(t: int) -> DisplacementField:
        (src, regions), (dst, _) = boundaries[t], boundaries[t + 1]
        return greedy_match(src, dst, limit, dt_s=dt_s, src_regions=regions, t_index=t)

    pairs = range(len(boundaries) - 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fields = list(pool.map(match_pair, pairs))
    else:
        fields = [match_pair(t) for t in pairs]

    warnings = []
    counts = []
    for t, fld in zip(pairs, fields, strict=True):
        n_src, n_dst = len(boundaries[t][0]), len(boundaries[t + 1][0])
        if not n_src or not n_dst:
            warnings.append(f"frame pair {t}: empty boundary (src {n_src}, dst {n_dst})")
        counts.append(
            PairCount(
                t_index=t,
                src_points=n_src,
                dst_points=n_dst,
                matched=len(fld),
                unmatched=fld.unmatched,
            )
        )

    samples = VelocitySamples.concat([to_velocities(f, res_px_per_cm, axis_deg) for f in fields])
    result = TrackingResult(
        samples=samples, pair_counts=counts, warnings=warnings, fields=fields
    )
    logger.info(
        f"Tracked {len(fields)} frame pairs: {len(samples)} velocity samples, "
        f"match rate {result.match_rate if result.match_rate is not None else 'n/a'}"
    )
    return result
