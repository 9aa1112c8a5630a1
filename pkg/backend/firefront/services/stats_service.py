"""Stats service layer: moment matching, NRMSE, summaries and the sampling advisor."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from firefront.errors import (
    ConfigError,
    DegenerateSampleError,
    DomainError,
    NormalizationError,
)
from firefront.models import SampleSet
from firefront.schemas.config import STRIDE_TOLERANCE, SequenceMeta
from firefront.schemas.results import FitResult, SampleSummary, SamplingReport, SamplingRow
from firefront.services._registry import get_family

__all__ = [
    "MIN_BINS",
    "PLATEAU_TOLERANCE",
    "default_bins",
    "histogram_density",
    "nrmse_against",
    "nrmse",
    "require_positive",
    "moment_match",
    "summarize",
    "inclination_angle",
    "u_max",
    "sampling_advisor",
]

logger = logging.getLogger(__name__)

MIN_BINS = 10
# Rates whose ratio is within this relative distance of the next-higher rate's are saturated
PLATEAU_TOLERANCE = 0.20
# Density ranges at or below this fraction of the peak count as flat
SPAN_RTOL = 1e-12

Bins = int | np.ndarray | None


def default_bins(values: np.ndarray) -> int:
    """Freedman–Diaconis bin count, at least MIN_BINS."""
    edges = np.histogram_bin_edges(values, bins="fd")
    return max(MIN_BINS, len(edges) - 1)


def histogram_density(values: np.ndarray, bins: Bins = None) -> tuple[np.ndarray, np.ndarray]:
    """Density-normalized histogram on equal-width bins spanning the data."""
    if bins is None:
        bins = default_bins(values)
    elif np.isscalar(bins) and int(bins) < 2:
        raise ConfigError(f"nrmse needs >= 2 bins, got {bins}")
    density, edges = np.histogram(values, bins=bins, density=True)
    return density, edges


def nrmse_against(
    values: np.ndarray, pdf: Callable[[np.ndarray], np.ndarray], bins: Bins = None
) -> float:
    """
    RMSE between pdf at bin centers and histogram densities, divided by the
    range of the histogram densities.
    """
    density, edges = histogram_density(np.asarray(values, dtype=np.float64), bins)
    span = float(density.max() - density.min())
    # Equal-count bins still differ by rounding in the density normalization
    if span <= SPAN_RTOL * max(float(density.max()), 1.0):
        raise NormalizationError("Histogram density range is zero; NRMSE is undefined")
    centers = 0.5 * (edges[:-1] + edges[1:])
    rmse = math.sqrt(float(np.mean((pdf(centers) - density) ** 2)))
    return rmse / span


def nrmse(s: SampleSet, family: str, lam: float, k: int = 1, bins: Bins = None) -> float:
    fam = get_family(family)
    return nrmse_against(s.values, lambda x: fam.pdf(x, lam, k), bins)


def require_positive(s: SampleSet, family: str) -> None:
    if len(s) == 0:
        raise DegenerateSampleError(f"Cannot fit {family} to an empty sample set '{s.name}'")
    if np.any(s.values <= 0):
        raise DomainError(
            f"{family} fit needs strictly positive samples; '{s.name}' has "
            f"{int((s.values <= 0).sum())} nonpositive values"
        )


def moment_match(s: SampleSet, family: str, bins: Bins = None) -> FitResult:
    """
    Match sample moments: exponential lam = 1/mean; Erlang k = round(mean^2/var)
    (at least 1) and lam = k/mean, with the n-1 variance.
    """
    fam = get_family(family)
    require_positive(s, family)
    lam, k = fam.moment_estimate(s.values)

    fit = FitResult(
        family=family,
        method="moment_matching",
        lam=lam,
        k=k,
        nrmse=nrmse(s, family, lam, k, bins),
        n=len(s),
        unit=s.unit,
        sample=s.name,
    )
    logger.info(f"Moment match {family} on '{s.name}' (n={len(s)}): lam={lam:.4g}, k={k}")
    return fit


def summarize(s: SampleSet) -> SampleSummary:
    """Mean, n-1 standard deviation, extrema and count; needs n >= 2."""
    if len(s) < 2:
        raise DegenerateSampleError(
            f"Summary needs >= 2 samples for a standard deviation, '{s.name}' has {len(s)}"
        )
    v = s.values
    return SampleSummary(
        mean=float(v.mean()),
        sd=float(v.std(ddof=1)),
        min=float(v.min()),
        max=float(v.max()),
        n=len(s),
        unit=s.unit,
    )


def inclination_angle(mean_horizontal: float, mean_vertical: float) -> float:
    """Plume inclination from the ground in degrees, atan2(vertical, horizontal)."""
    return math.degrees(math.atan2(mean_vertical, mean_horizontal))


def u_max(f_hz: float, fov_px: int, res_px_per_cm: float) -> float:
    """Largest measurable speed (cm/s): half the sampling rate times FOV / RES."""
    return f_hz / 2.0 * fov_px / res_px_per_cm


def sampling_advisor(
    meta: SequenceMeta,
    rates: Sequence[float],
    u_obs: Sequence[float],
    longitudinal: Sequence[np.ndarray] | None = None,
) -> SamplingReport:
    """
    Tabulate u_max against observed speeds and recommend a sampling rate.

    A rate is saturated when its ratio u_obs/u_max is within 20% (relative)
    of the next-higher rate's ratio. The recommendation is the lowest
    saturated rate, else the highest rate; a single rate gets none.
    """
    if len(rates) != len(u_obs):
        raise ConfigError(f"{len(rates)} rates but {len(u_obs)} observed speeds")
    for f in rates:
        if f > 0:
            ratio = meta.frame_rate_hz / f
            if f > meta.frame_rate_hz or abs(ratio - round(ratio)) >= STRIDE_TOLERANCE:
                raise ConfigError(f"rate {f} Hz does not divide {meta.frame_rate_hz} Hz")

    rows: list[dict] = []
    for i, (f, obs) in enumerate(zip(rates, u_obs, strict=True)):
        degenerate = f <= 0
        limit = 0.0 if degenerate else u_max(f, meta.fov_px, meta.resolution_px_per_cm)
        ratio = 0.0 if degenerate or limit == 0 else min(obs / limit, 1.0)
        row = {
            "f_hz": float(f),
            "u_max": limit,
            "u_min": None if degenerate else f / meta.resolution_px_per_cm,
            "u_obs": float(obs),
            "ratio": max(ratio, 0.0),
            "degenerate": degenerate,
        }
        if longitudinal is not None and len(longitudinal[i]) > 1:
            row["mean_longitudinal"] = float(np.mean(longitudinal[i]))
            row["sd_longitudinal"] = float(np.std(longitudinal[i], ddof=1))
        rows.append(row)

    order = sorted(
        (i for i, r in enumerate(rows) if not r["degenerate"]), key=lambda i: rows[i]["f_hz"]
    )
    for lower, upper in zip(order, order[1:], strict=False):
        ratio_hi = rows[upper]["ratio"]
        gap = abs(rows[lower]["ratio"] - ratio_hi)
        rows[lower]["saturated"] = gap <= PLATEAU_TOLERANCE * ratio_hi

    recommended = None
    if len(order) > 1:
        saturated = [rows[i]["f_hz"] for i in order if rows[i].get("saturated")]
        recommended = saturated[0] if saturated else rows[order[-1]]["f_hz"]

    report = SamplingReport(
        fov_px=meta.fov_px,
        resolution_px_per_cm=meta.resolution_px_per_cm,
        rows=[SamplingRow(**r) for r in rows],
        recommended_f_hz=recommended,
    )
    logger.info(f"Sampling advisor over {list(rates)} Hz: recommended {recommended}")
    return report
