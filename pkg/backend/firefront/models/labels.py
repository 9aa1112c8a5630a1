"""Mask and label-grid conventions."""

from enum import IntEnum

import numpy as np

# bool (H, W); row-major, True = set
BinaryMask = np.ndarray
# uint8 (H, W) holding LabelCode values
LabelGrid = np.ndarray


class LabelCode(IntEnum):
    UNDISTURBED = 0
    BURNING = 1
    BURNED_COOLING = 2
    SMOKE = 3


CLASS_CODES: dict[str, LabelCode] = {
    "burning": LabelCode.BURNING,
    "burned_cooling": LabelCode.BURNED_COOLING,
    "smoke": LabelCode.SMOKE,
}

# Highest precedence first
LABEL_PRECEDENCE: tuple[str, ...] = ("burning", "burned_cooling", "smoke")
