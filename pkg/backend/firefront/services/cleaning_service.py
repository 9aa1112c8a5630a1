"""Cleaning service layer: coarse-to-fine neighbor-count noise removal."""

import cv2
import numpy as np

from firefront.models import BinaryMask
from firefront.schemas.config import CleaningSchedule

__all__ = ["neighbor_counts", "single_level_clean", "clean", "clean_to_fixed_point"]


def neighbor_counts(mask: BinaryMask, radius: int) -> np.ndarray:
    """
    Count set pixels within Chebyshev radius of every pixel, excluding itself.

    Neighborhoods are clipped at the image edges (zero padding).
    """
    size = 2 * radius + 1
    window = cv2.boxFilter(
        mask.astype(np.float64),
        ddepth=-1,
        ksize=(size, size),
        normalize=False,
        borderType=cv2.BORDER_CONSTANT,
    )
    return np.rint(window).astype(np.int64) - mask.astype(np.int64)


def single_level_clean(mask: BinaryMask, radius: int, min_neighbors: int) -> BinaryMask:
    """Clear, from one snapshot, every set pixel with fewer than min_neighbors neighbors."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return mask.copy()
    return mask & (neighbor_counts(mask, radius) >= min_neighbors)


def clean(mask: BinaryMask, schedule: CleaningSchedule) -> BinaryMask:
    out = np.asarray(mask, dtype=bool)
    for level in schedule.levels:
        out = single_level_clean(out, level.radius, level.min_neighbors)
    return out


def clean_to_fixed_point(
    mask: BinaryMask, schedule: CleaningSchedule, max_iter: int | None = None
) -> tuple[BinaryMask, int]:
    """
    Apply clean repeatedly until the mask stops changing.

    Returns the fixed point and the number of applications that changed it.
    Each change clears at least one pixel, so width*height bounds the loop.
    """
    current = np.asarray(mask, dtype=bool)
    limit = max_iter if max_iter is not None else current.size
    for iteration in range(limit + 1):
        nxt = clean(current, schedule)
        if np.array_equal(nxt, current):
            return current, iteration
        current = nxt
    return current, limit
