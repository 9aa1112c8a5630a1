"""Fitting service layer: dispatches a sample set to the requested estimator."""

import logging

from firefront.errors import ConfigError
from firefront.models import SampleSet, VelocitySamples
from firefront.schemas.config import FittingConfig, McmcConfig
from firefront.schemas.results import FitResult
from firefront.services.mcmc_service import mcmc_fit
from firefront.services.stats_service import Bins, moment_match

__all__ = ["SAMPLE_UNITS", "fit_samples", "velocity_sample_sets", "fit_all"]

logger = logging.getLogger(__name__)

SAMPLE_UNITS = {
    "longitudinal_positive": "cm/s",
    "longitudinal": "cm/s",
    "transverse": "cm/s",
    "magnitude": "cm/s",
    "burn_time": "s",
}


def fit_samples(
    samples: SampleSet,
    family: str,
    method: str,
    mcmc: McmcConfig | None = None,
    seed: int = 0,
    bins: Bins = None,
) -> FitResult:
    if method == "moment_matching":
        return moment_match(samples, family, bins)
    if method == "mcmc":
        return mcmc_fit(samples, family, mcmc, seed=seed, bins=bins)
    raise ConfigError(f"Unknown fitting method '{method}'")


def velocity_sample_sets(velocity: VelocitySamples) -> dict[str, SampleSet]:
    """Named sample sets derived from the pooled velocity samples."""
    arrays = {
        "longitudinal_positive": velocity.positive_longitudinal(),
        "longitudinal": velocity.longitudinal,
        "transverse": velocity.transverse,
        "magnitude": velocity.magnitude,
    }
    return {
        name: SampleSet(values, unit=SAMPLE_UNITS[name], name=name)
        for name, values in arrays.items()
    }


def fit_all(
    sample_sets: dict[str, SampleSet], config: FittingConfig, seed: int
) -> tuple[list[FitResult], list[str]]:
    """
    Run every configured (target, method) pair.

    Targets whose sample set is missing or empty are skipped with a warning.
    Each MCMC fit gets its own seed offset so targets do not share a stream.
    """
    fits: list[FitResult] = []
    warnings: list[str] = []
    for i, target in enumerate(config.targets):
        s = sample_sets.get(target.sample)
        if s is None or len(s) == 0:
            message = f"sample set '{target.sample}' is empty; {target.family} fit skipped"
            logger.warning(message)
            warnings.append(message)
            continue
        for method in config.methods:
            fits.append(
                fit_samples(s, target.family, method, config.mcmc, seed=seed + i, bins=config.bins)
            )
    return fits, warnings
