"""Pydantic schemas for fit results, reports and the bundle manifest."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from firefront.schemas.config import FamilyName, MethodName

# --- Statistics Schemas ---


class SampleSummary(BaseModel):
    """Descriptive statistics of one sample set (sd uses the n-1 denominator)."""

    model_config = ConfigDict(frozen=True)

    mean: float
    sd: float
    min: float
    max: float
    n: int = Field(ge=2)
    unit: str = ""


class ChainDiagnostics(BaseModel):
    """Convergence record of one MCMC fit."""

    model_config = ConfigDict(frozen=True)

    chains: int
    iterations: int
    burn_in: int
    kept_samples: int
    rhat: float
    acceptance: float
    step: float
    k_selected: int


class FitResult(BaseModel):
    """Fitted distribution for one sample set."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    family: FamilyName
    method: MethodName
    lam: float = Field(gt=0, serialization_alias="lambda", validation_alias="lambda")
    k: int = Field(default=1, ge=1)
    credible: dict[str, tuple[float, float]] | None = None
    nrmse: float = Field(ge=0)
    n: int = Field(ge=1)
    unit: str = ""
    sample: str = ""
    seed: int | None = None
    diagnostics: ChainDiagnostics | None = None

    @model_validator(mode="after")
    def _check_intervals(self) -> "FitResult":
        if self.method == "mcmc" and not self.credible:
            raise ValueError("MCMC fits must carry credible intervals")
        if self.method == "moment_matching" and self.credible is not None:
            raise ValueError("moment-matching fits carry no credible intervals")
        return self


class SamplingRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    f_hz: float
    u_max: float
    u_min: float | None
    u_obs: float
    ratio: float = Field(ge=0, le=1)
    saturated: bool = False
    degenerate: bool = False
    mean_longitudinal: float | None = None
    sd_longitudinal: float | None = None


class SamplingReport(BaseModel):
    """Per-rate Nyquist limits against observed speeds."""

    model_config = ConfigDict(frozen=True)

    fov_px: int
    resolution_px_per_cm: float
    rows: list[SamplingRow]
    recommended_f_hz: float | None = None


# --- Run Schemas ---


class PairCount(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_index: int
    src_points: int
    dst_points: int
    matched: int
    unmatched: int


class RunReport(BaseModel):
    """Human-facing summary of one pipeline run."""

    frames: int
    regions_per_frame: list[int]
    pair_counts: list[PairCount] = Field(default_factory=list)
    match_rate: float | None = None
    mean_speed: float | None = None
    # Direction of the mean velocity above the horizontal, image y flipped to point up
    inclination_deg: float | None = None
    summaries: dict[str, SampleSummary] = Field(default_factory=dict)
    fits: list[FitResult] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    output_dir: str | None = None


class Manifest(BaseModel):
    """Commit record of an exported bundle; reproduces the run configuration."""

    model_config = ConfigDict(frozen=True)

    software_version: str
    config: dict[str, Any]
    config_sha256: str
    seed: int
    resolution_px_per_cm: float
    sample_rate_hz: float
    timesteps: int
    input_checksums: dict[str, str] = Field(default_factory=dict)
    files: list[str] = Field(default_factory=list)
