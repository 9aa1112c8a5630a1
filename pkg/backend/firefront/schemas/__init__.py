"""Pydantic schemas for configuration and result documents."""

from firefront.schemas.config import (
    BoundaryConfig,
    CleaningLevel,
    CleaningSchedule,
    ClusteringConfig,
    ColorThresholds,
    ExportConfig,
    FitTarget,
    FittingConfig,
    InpaintConfig,
    McmcConfig,
    PipelineConfig,
    Roi,
    SegmentationConfig,
    SequenceMeta,
    ThermalBand,
    ThermalBands,
    TrackingConfig,
)
from firefront.schemas.results import (
    ChainDiagnostics,
    FitResult,
    Manifest,
    PairCount,
    RunReport,
    SampleSummary,
    SamplingReport,
    SamplingRow,
)
from firefront.schemas.scenario import Scenario, ScenarioKind

__all__ = [
    # Config schemas
    "BoundaryConfig",
    "CleaningLevel",
    "CleaningSchedule",
    "ClusteringConfig",
    "ColorThresholds",
    "ExportConfig",
    "FitTarget",
    "FittingConfig",
    "InpaintConfig",
    "McmcConfig",
    "PipelineConfig",
    "Roi",
    "SegmentationConfig",
    "SequenceMeta",
    "ThermalBand",
    "ThermalBands",
    "TrackingConfig",
    # Result schemas
    "ChainDiagnostics",
    "FitResult",
    "Manifest",
    "PairCount",
    "RunReport",
    "SampleSummary",
    "SamplingReport",
    "SamplingRow",
    # Synthetic scenarios
    "Scenario",
    "ScenarioKind",
]
