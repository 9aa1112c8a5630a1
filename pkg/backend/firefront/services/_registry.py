"""Distribution family registry for eliminating repetitive if/elif branching."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln

from firefront.errors import DegenerateSampleError


@dataclass(frozen=True)
class SufficientStats:
    """n, sum(x), sum(log x) of a positive sample; enough for both families."""

    n: int
    sum_x: float
    sum_log_x: float

    @classmethod
    def of(cls, values: np.ndarray) -> "SufficientStats":
        return cls(
            n=int(values.size),
            sum_x=float(values.sum()),
            sum_log_x=float(np.log(values).sum()),
        )


@dataclass(frozen=True)
class DistributionFamily:
    """Configuration for a fitted family's density, likelihood and moment estimator."""

    name: str
    # Whether the integer shape k is a free parameter
    has_shape: bool
    pdf: Callable[[np.ndarray, float, int], np.ndarray]
    # Vectorized log-likelihood over broadcastable lam and k arrays
    log_likelihood: Callable[[SufficientStats, np.ndarray, np.ndarray], np.ndarray]
    # (lam, k) from the sample moments of a positive sample
    moment_estimate: Callable[[np.ndarray], tuple[float, int]]


def _exponential_pdf(x: np.ndarray, lam: float, k: int = 1) -> np.ndarray:
    return stats.expon.pdf(x, scale=1.0 / lam)


def _erlang_pdf(x: np.ndarray, lam: float, k: int = 1) -> np.ndarray:
    return stats.erlang.pdf(x, a=k, scale=1.0 / lam)


def _erlang_log_likelihood(s: SufficientStats, lam: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (
        s.n * k * np.log(lam)
        - lam * s.sum_x
        + (k - 1) * s.sum_log_x
        - s.n * gammaln(k)
    )


def _exponential_log_likelihood(
    s: SufficientStats, lam: np.ndarray, k: np.ndarray
) -> np.ndarray:
    return s.n * np.log(lam) - lam * s.sum_x


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _exponential_moments(values: np.ndarray) -> tuple[float, int]:
    return 1.0 / float(values.mean()), 1


def _erlang_moments(values: np.ndarray) -> tuple[float, int]:
    """k = round(mean^2 / var), at least 1, and lam = k / mean, with the n-1 variance."""
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if values.size > 1 else 0.0
    if var <= 0.0:
        raise DegenerateSampleError("Erlang moment match needs a sample variance > 0")
    k = max(1, round_half_up(mean * mean / var))
    return k / mean, k


DISTRIBUTION_REGISTRY: dict[str, DistributionFamily] = {
    "exponential": DistributionFamily(
        name="exponential",
        has_shape=False,
        pdf=_exponential_pdf,
        log_likelihood=_exponential_log_likelihood,
        moment_estimate=_exponential_moments,
    ),
    "erlang": DistributionFamily(
        name="erlang",
        has_shape=True,
        pdf=_erlang_pdf,
        log_likelihood=_erlang_log_likelihood,
        moment_estimate=_erlang_moments,
    ),
}


def get_family(name: str) -> DistributionFamily:
    """Get the registered family, raising KeyError with the known names."""
    try:
        return DISTRIBUTION_REGISTRY[name]
    except KeyError:
        known = sorted(DISTRIBUTION_REGISTRY)
        raise KeyError(f"Unknown family '{name}', expected one of {known}") from None
