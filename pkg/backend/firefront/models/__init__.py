"""In-memory domain types."""

from firefront.models.frame import Frame, FrameKind, HsvPixel
from firefront.models.geometry import (
    NOISE,
    AlphaBoundary,
    Clustering,
    PointSet,
    RegionBoundary,
    Triangulation,
)
from firefront.models.labels import (
    CLASS_CODES,
    LABEL_PRECEDENCE,
    BinaryMask,
    LabelCode,
    LabelGrid,
)
from firefront.models.motion import (
    DisplacementField,
    TrackingResult,
    VelocitySamples,
)
from firefront.models.samples import SampleSet

__all__ = [
    "Frame",
    "FrameKind",
    "HsvPixel",
    "NOISE",
    "AlphaBoundary",
    "Clustering",
    "PointSet",
    "RegionBoundary",
    "Triangulation",
    "CLASS_CODES",
    "LABEL_PRECEDENCE",
    "BinaryMask",
    "LabelCode",
    "LabelGrid",
    "DisplacementField",
    "TrackingResult",
    "VelocitySamples",
    "SampleSet",
]
