"""p-values, confidence intervals and the two-stage sampling demonstration
for the normal location model with known standard deviation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .intervals import IntervalSet
from .kernel import MonteCarloEstimate, normal_quantile, normal_sf, rng, run_blocks


@dataclass(frozen=True)
class LocationNormalData:
    """Summary of an iid N(mu, sigma0**2) sample: size, mean and known sd."""

    n: int
    xbar: float
    sigma0: float = 1.0

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        if not (self.sigma0 > 0 and math.isfinite(self.sigma0)):
            raise ValueError(f"sigma0 must be positive and finite, got {self.sigma0!r}")
        if not math.isfinite(self.xbar):
            raise ValueError(f"xbar must be finite, got {self.xbar!r}")

    @property
    def se(self) -> float:
        return self.sigma0 / math.sqrt(self.n)

    def z(self, mu0: float) -> float:
        return math.sqrt(self.n) * abs(self.xbar - mu0) / self.sigma0


def two_sided_pvalue(z):
    """2(1 - Phi(|z|)) for a standardised statistic; accepts arrays."""
    return 2.0 * normal_sf(np.abs(z))


def pvalue_location_normal(data: LocationNormalData, mu0: float) -> float:
    """p-value for H0: mu = mu0 based on sqrt(n)|xbar - mu0|/sigma0."""
    if data.n < 1:
        raise ValueError("p-value needs at least one observation")
    return float(min(1.0, two_sided_pvalue(data.z(mu0))))


def confidence_interval(data: LocationNormalData, alpha: float) -> IntervalSet:
    """The set {mu0 : p-value > alpha}, i.e. xbar +/- z_{1-alpha/2} sigma0/sqrt(n)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if data.n < 1:
        raise ValueError("confidence interval needs at least one observation")
    half = normal_quantile(1.0 - alpha / 2.0) * data.se
    if half <= 0:
        return IntervalSet()
    return IntervalSet.single(data.xbar - half, data.xbar + half)


def _two_stage_block(count: int, seed: int, *, alpha: float, n1: int, n2: int) -> tuple[float]:
    g = rng(seed)
    # standardised stage means under H0; the pooled statistic combines them by sample size
    z1 = g.standard_normal(count)
    if n2 > 0:
        z2 = g.standard_normal(count)
        pooled = (math.sqrt(n1) * z1 + math.sqrt(n2) * z2) / math.sqrt(n1 + n2)
    else:
        pooled = z1
    first = two_sided_pvalue(z1) <= alpha
    second = two_sided_pvalue(pooled) <= alpha
    return (float(np.count_nonzero(first | second)),)


def two_stage_rejection_prob(
    alpha: float,
    n1: int,
    n2: int,
    reps: int = 1_000_000,
    seed: int = 0,
    *,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Simulated P(A) + P(A^c and B) under H0.

    A is rejection at level ``alpha`` from the first ``n1`` observations; if
    that fails, ``n2`` more are drawn and B is rejection using the pooled mean
    of all ``n1 + n2`` as if it were a single fixed-size sample. With
    ``n2 == 0`` the second look adds nothing and the rate is ``alpha``.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if n1 < 1 or n2 < 0:
        raise ValueError("need n1 >= 1 and n2 >= 0")
    if reps < 10_000:
        raise ValueError("reps must be at least 10**4")
    task = partial(_two_stage_block, alpha=alpha, n1=n1, n2=n2)
    (hits,) = run_blocks(task, reps, seed, workers=workers)
    return MonteCarloEstimate.from_count(hits, reps)
