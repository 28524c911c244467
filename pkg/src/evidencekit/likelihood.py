"""Likelihood-based summaries for the normal location and scale models.

Covers the relative likelihood and its regions, and, for psi = |mu|, the
profile and integrated likelihoods plus the sampling density of |xbar|. The
scale-normal helpers show how profiling a future sample shifts the MLE of
sigma**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .freq import LocationNormalData
from .intervals import IntervalSet

# Royall's benchmarks: relative likelihood above 1/8 is "very strong", above 1/32 "quite strong"
ROYALL_VERY_STRONG = 1.0 / 8.0
ROYALL_QUITE_STRONG = 1.0 / 32.0

DEFAULT_STEP = 0.01


class CurveKind(str, Enum):
    PLAIN = "plain"
    RELATIVE = "relative"
    PROFILE = "profile"
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class LikelihoodCurve:
    psi: np.ndarray
    values: np.ndarray
    kind: CurveKind

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ValueError("likelihood values must be nonnegative")

    def argmax(self) -> float:
        # np.argmax returns the first maximiser, i.e. the smallest psi
        return float(self.psi[int(np.argmax(self.values))])

    def relative(self) -> "LikelihoodCurve":
        return LikelihoodCurve(self.psi, self.values / self.values.max(), CurveKind.RELATIVE)

    def rows(self):
        for p, v in zip(self.psi, self.values):
            yield float(p), float(v), self.kind.value


def _quad_exponent(data: LocationNormalData, diff):
    return -data.n * np.square(diff) / (2.0 * data.sigma0**2)


def relative_likelihood_location(data: LocationNormalData, mu):
    """exp(-n (xbar - mu)^2 / 2 sigma0^2): the likelihood divided by its value at the MLE xbar."""
    out = np.exp(_quad_exponent(data, data.xbar - np.asarray(mu, dtype=float)))
    return float(out) if np.ndim(mu) == 0 else out


def likelihood_region(data: LocationNormalData, r: float) -> IntervalSet:
    """{mu : relative likelihood >= 1/r}, an interval centred at xbar."""
    if r < 1:
        raise ValueError("r must be >= 1")
    half = data.se * math.sqrt(2.0 * math.log(r))
    if half == 0:
        return IntervalSet()
    # closed at the top in exact arithmetic; the half-open set differs by one point
    return IntervalSet.single(data.xbar - half, data.xbar + half)


def _check_psi(psi):
    psi = np.asarray(psi, dtype=float)
    if np.any(psi < 0):
        raise ValueError("psi = |mu| cannot be negative")
    return psi


def profile_likelihood_abs(data: LocationNormalData, psi):
    """Profile likelihood of psi = |mu|: the better of the two signs, exp(-n(|xbar| - psi)^2/2 sigma0^2)."""
    p = _check_psi(psi)
    out = np.exp(_quad_exponent(data, abs(data.xbar) - p))
    return float(out) if np.ndim(psi) == 0 else out


def integrated_likelihood_abs(data: LocationNormalData, psi, p_sign: float = 0.5):
    """Likelihood of psi = |mu| averaged over the sign, with P(sign = +1 | psi) = p_sign."""
    if not 0 < p_sign < 1:
        raise ValueError("p_sign must lie in (0, 1)")
    p = _check_psi(psi)
    out = p_sign * np.exp(_quad_exponent(data, data.xbar - p)) + (1.0 - p_sign) * np.exp(
        _quad_exponent(data, data.xbar + p)
    )
    return float(out) if np.ndim(psi) == 0 else out


def abs_mean_density(psi_true: float, sgn: int, data: LocationNormalData, at=None):
    """Sampling density of |xbar| when mu = sgn * psi_true.

    Evaluated at ``|data.xbar|`` unless ``at`` supplies other values of |xbar|.
    """
    if psi_true < 0:
        raise ValueError("psi_true must be nonnegative")
    if sgn not in (-1, 1):
        raise ValueError("sgn must be +1 or -1")
    t = abs(data.xbar) if at is None else np.asarray(at, dtype=float)
    mu = sgn * psi_true
    c = math.sqrt(data.n) / (math.sqrt(2.0 * math.pi) * data.sigma0)
    out = c * (np.exp(_quad_exponent(data, t - mu)) + np.exp(_quad_exponent(data, t + mu)))
    return float(out) if np.ndim(out) == 0 else out


def psi_grid(data: LocationNormalData, step: float = DEFAULT_STEP, width: float = 6.0) -> np.ndarray:
    """[0, |xbar| + width * sigma0/sqrt(n)] at the given spacing."""
    upper = abs(data.xbar) + width * data.se
    return np.arange(0, int(math.ceil(upper / step)) + 1) * step


def profile_curve(data: LocationNormalData, grid: Optional[np.ndarray] = None) -> LikelihoodCurve:
    grid = psi_grid(data) if grid is None else np.asarray(grid, dtype=float)
    return LikelihoodCurve(grid, profile_likelihood_abs(data, grid), CurveKind.PROFILE)


def integrated_curve(
    data: LocationNormalData, p_sign: float = 0.5, grid: Optional[np.ndarray] = None
) -> LikelihoodCurve:
    grid = psi_grid(data) if grid is None else np.asarray(grid, dtype=float)
    return LikelihoodCurve(grid, integrated_likelihood_abs(data, grid, p_sign), CurveKind.INTEGRATED)


@dataclass(frozen=True)
class ScaleNormalData:
    """n observed values from N(0, sigma^2) with sum of squares sx2, and k values still to be predicted."""

    n: int
    sx2: float
    k: int = 0

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise ValueError("n and k must be nonnegative")
        if self.sx2 < 0:
            raise ValueError("sx2 must be nonnegative")


@dataclass(frozen=True)
class ScaleNormalMLEs:
    mle: float
    profile_mle: float
    predictive_y: float


def scale_normal_likelihood(data: ScaleNormalData, sigma2):
    s2 = np.asarray(sigma2, dtype=float)
    return s2 ** (-data.n / 2.0) * np.exp(-data.sx2 / (2.0 * s2))


def scale_normal_profile_likelihood(data: ScaleNormalData, sigma2):
    """Profile of the predictive likelihood over the future values y; the sup sits at y = 0."""
    s2 = np.asarray(sigma2, dtype=float)
    return s2 ** (-(data.n + data.k) / 2.0) * np.exp(-data.sx2 / (2.0 * s2))


def scale_normal_mles(data: ScaleNormalData) -> ScaleNormalMLEs:
    if data.n < 1:
        raise ValueError("need at least one observed value")
    return ScaleNormalMLEs(
        mle=data.sx2 / data.n,
        profile_mle=data.sx2 / (data.n + data.k),
        predictive_y=0.0,
    )
