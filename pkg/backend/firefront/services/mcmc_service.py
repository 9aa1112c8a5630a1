"""MCMC service layer: random-walk Metropolis fits with credible intervals."""

import logging
from dataclasses import dataclass

import numpy as np

from firefront.errors import ConvergenceError, DegenerateSampleError
from firefront.models import SampleSet
from firefront.schemas.config import McmcConfig
from firefront.schemas.results import ChainDiagnostics, FitResult
from firefront.services._registry import SufficientStats, get_family
from firefront.services.stats_service import Bins, nrmse, require_positive

__all__ = ["PosteriorDraws", "split_rhat", "sample_posterior", "mcmc_fit"]

logger = logging.getLogger(__name__)

# Optimal random-walk scale for one parameter
RW_SCALE = 2.38


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Post burn-in draws of log(lam) for every k and chain."""

    ks: np.ndarray  # (K,)
    theta: np.ndarray  # (kept, K, C)
    mean_log_lik: np.ndarray  # (K,)
    acceptance: np.ndarray  # (K,) post burn-in acceptance
    step: np.ndarray  # (K,) adapted step sizes


def split_rhat(draws: np.ndarray) -> float:
    """
    Split potential scale reduction of a (n, chains) draw array.

    Each chain is halved, so 4 chains give 8 sequences.
    """
    n = draws.shape[0] // 2
    halves = np.concatenate([draws[:n], draws[n : 2 * n]], axis=1)
    within = float(halves.var(axis=0, ddof=1).mean())
    between = n * float(halves.mean(axis=0).var(ddof=1))
    if within == 0.0:
        return 1.0 if between == 0.0 else float("inf")
    pooled = (n - 1) / n * within + between / n
    return float(np.sqrt(pooled / within))


def sample_posterior(
    stats: SufficientStats, family: str, ks: np.ndarray, config: McmcConfig, seed: int
) -> PosteriorDraws:
    """
    Random-walk Metropolis on theta = log(lam) under a flat prior on theta.

    All shapes k and chains advance together as one (K, C) state array. The
    step size per k is tuned toward the target acceptance every
    adapt_interval burn-in iterations and frozen afterwards.
    """
    rng = np.random.default_rng(seed)
    log_likelihood = get_family(family).log_likelihood
    K, C = len(ks), config.chains
    k_col = ks.astype(np.float64)[:, None]

    def log_post(theta: np.ndarray) -> np.ndarray:
        return log_likelihood(stats, np.exp(theta), k_col)

    # Start overdispersed around the per-k maximum likelihood estimate
    posterior_sd = 1.0 / np.sqrt(stats.n * k_col)
    mle = np.log(k_col * stats.n / stats.sum_x)
    theta = mle + 3.0 * posterior_sd * rng.standard_normal((K, C))
    current = log_post(theta)
    step = RW_SCALE * posterior_sd[:, 0]

    burn_in, kept = config.burn_in, config.kept_per_chain
    draws = np.empty((kept, K, C))
    log_lik_sum = np.zeros(K)
    accepted_window = np.zeros(K)
    accepted_kept = np.zeros(K)

    for it in range(config.iterations):
        proposal = theta + step[:, None] * rng.standard_normal((K, C))
        proposed = log_post(proposal)
        accept = np.log(rng.random((K, C))) < proposed - current
        theta = np.where(accept, proposal, theta)
        current = np.where(accept, proposed, current)
        n_accepted = accept.sum(axis=1)

        if it < burn_in:
            accepted_window += n_accepted
            if (it + 1) % config.adapt_interval == 0:
                rate = accepted_window / (config.adapt_interval * C)
                step *= np.exp(rate - config.target_acceptance)
                accepted_window[:] = 0.0
        else:
            draws[it - burn_in] = theta
            log_lik_sum += current.sum(axis=1)
            accepted_kept += n_accepted

    return PosteriorDraws(
        ks=ks,
        theta=draws,
        mean_log_lik=log_lik_sum / (kept * C),
        acceptance=accepted_kept / (kept * C),
        step=step,
    )


def _point_estimate(
    s: SampleSet, family: str, k: int, lam_draws: np.ndarray, bins: Bins
) -> tuple[float, float]:
    """
    Posterior mean or posterior mode, whichever has the lower NRMSE.

    Under the flat prior on log(lam) the mode at fixed k is k * n / sum(x).
    """
    candidates = [float(lam_draws.mean()), k / float(s.values.mean())]
    scored = [(nrmse(s, family, lam, k, bins), lam) for lam in candidates]
    err, lam = min(scored)
    return lam, err


def mcmc_fit(
    s: SampleSet,
    family: str,
    config: McmcConfig | None = None,
    seed: int = 0,
    bins: Bins = None,
) -> FitResult:
    """
    Posterior fit with a central 95% credible interval for lam.

    Erlang sweeps k over 1..k_max and keeps the k with the highest mean
    posterior log-likelihood. Raises ConvergenceError when split-R̂ of the
    selected chain set exceeds rhat_max.
    """
    config = config or McmcConfig()
    fam = get_family(family)
    require_positive(s, family)
    if fam.has_shape and (len(s) < 2 or float(s.values.var()) == 0.0):
        raise DegenerateSampleError(
            f"Erlang MCMC needs a sample with variance > 0 ('{s.name}', n={len(s)})"
        )

    ks = np.arange(1, config.k_max + 1) if fam.has_shape else np.array([1])
    posterior = sample_posterior(SufficientStats.of(s.values), family, ks, config, seed)
    best = int(np.argmax(posterior.mean_log_lik))
    k = int(ks[best])
    lam_draws = np.exp(posterior.theta[:, best, :])

    rhat = split_rhat(lam_draws)
    diagnostics = ChainDiagnostics(
        chains=config.chains,
        iterations=config.iterations,
        burn_in=config.burn_in,
        kept_samples=int(lam_draws.size),
        rhat=rhat,
        acceptance=float(posterior.acceptance[best]),
        step=float(posterior.step[best]),
        k_selected=k,
    )
    if not rhat <= config.rhat_max:
        raise ConvergenceError(
            f"MCMC {family} fit on '{s.name}' did not converge: split-R̂ {rhat:.4f} "
            f"> {config.rhat_max}",
            diagnostics=diagnostics.model_dump(),
        )

    lo, hi = np.percentile(lam_draws, [2.5, 97.5])
    lam, err = _point_estimate(s, family, k, lam_draws, bins)
    fit = FitResult(
        family=family,
        method="mcmc",
        lam=lam,
        k=k,
        credible={"lambda": (float(lo), float(hi))},
        nrmse=err,
        n=len(s),
        unit=s.unit,
        sample=s.name,
        seed=seed,
        diagnostics=diagnostics,
    )
    logger.info(
        f"MCMC {family} on '{s.name}' (n={len(s)}): lam={lam:.4g} "
        f"[{lo:.4g}, {hi:.4g}], k={k}, R̂={rhat:.4f}, acceptance={diagnostics.acceptance:.2f}"
    )
    return fit
