"""Relative belief inference on a delta-discretised parameter of interest.

The model is the normal location model with a N(mu0, tau0**2) prior on mu.
The parameter of interest is either mu itself or psi = |mu|. Prior and
posterior probabilities of the cells [psi_i - delta/2, psi_i + delta/2) are
exact normal (or folded normal) cdf differences. Every evidential summary is
read off these two mass vectors: the relative belief ratio, the estimate, the
plausible region, the strength, credible regions and Bayes factors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .freq import LocationNormalData
from .intervals import IntervalSet
from .kernel import NormalParams, folded_interval_mass, interval_mass, normal_pdf, normal_sf

# Half-width of the grid in sds of prior and posterior; leaves < 4e-8 of either outside.
GRID_Z = 5.5
MIN_PRIOR_MASS = 1e-300
NORMALISATION_TOL = 1e-6


class Target(str, Enum):
    ABS = "abs_value"
    IDENTITY = "identity"


@dataclass(frozen=True)
class BayesInferenceBase:
    data: LocationNormalData
    prior: NormalParams
    delta: float = 0.01

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.delta < self.prior.sd:
            raise ValueError("delta must be smaller than the prior sd")

    def with_xbar(self, xbar: float) -> "BayesInferenceBase":
        d = self.data
        return BayesInferenceBase(LocationNormalData(d.n, xbar, d.sigma0), self.prior, self.delta)


def posterior_params(base: BayesInferenceBase) -> NormalParams:
    d, pr = base.data, base.prior
    if d.n == 0:
        return pr
    precision = d.n / d.sigma0**2 + 1.0 / pr.var
    mean = (d.n * d.xbar / d.sigma0**2 + pr.mean / pr.var) / precision
    return NormalParams(mean, math.sqrt(1.0 / precision))


def posterior_mean_sd(base: BayesInferenceBase, xbar):
    """Posterior mean for each value in ``xbar`` and the (data-free) posterior sd."""
    d, pr = base.data, base.prior
    precision = d.n / d.sigma0**2 + 1.0 / pr.var
    mean = (d.n * np.asarray(xbar, dtype=float) / d.sigma0**2 + pr.mean / pr.var) / precision
    return mean, math.sqrt(1.0 / precision)


def cell_masses(lo, hi, mean, sd, target: Target):
    """Probabilities of the cells [lo, hi) for the parameter of interest; broadcasts."""
    if target is Target.ABS:
        return folded_interval_mass(lo, hi, mean, sd)
    return interval_mass(lo, hi, mean, sd)


def cell_bounds(psi: float, delta: float, anchor: float = 0.0, target: Target = Target.ABS):
    """Edges of the grid cell containing ``psi`` (half-open, so a boundary belongs to the right cell)."""
    k = math.floor((psi - anchor) / delta + 0.5)
    lo = anchor + (k - 0.5) * delta
    hi = anchor + (k + 0.5) * delta
    if psi >= hi:  # guard against rounding in the floor
        lo, hi = hi, anchor + (k + 1.5) * delta
    elif psi < lo:
        lo, hi = anchor + (k - 1.5) * delta, lo
    if target is Target.ABS:
        lo = max(lo, 0.0)
    return lo, hi


@dataclass(frozen=True)
class EvidenceGrid:
    lo: np.ndarray
    hi: np.ndarray
    mid: np.ndarray
    prior_mass: np.ndarray
    posterior_mass: np.ndarray
    target: Target
    delta: float
    anchor: float = 0.0
    rb: np.ndarray = field(init=False)
    valid: np.ndarray = field(init=False)

    def __post_init__(self):
        if np.any(self.prior_mass < 0) or np.any(self.posterior_mass < 0):
            raise ValueError("cell masses must be nonnegative")
        for name, m in (("prior", self.prior_mass), ("posterior", self.posterior_mass)):
            if abs(m.sum() - 1.0) > NORMALISATION_TOL:
                raise ValueError(f"{name} masses sum to {m.sum()!r}, not 1")
        valid = self.prior_mass >= MIN_PRIOR_MASS
        rb = np.full(self.prior_mass.shape, np.nan)
        rb[valid] = self.posterior_mass[valid] / self.prior_mass[valid]
        object.__setattr__(self, "rb", rb)
        object.__setattr__(self, "valid", valid)

    def __len__(self):
        return self.mid.size

    def cell_index(self, psi: float) -> int:
        i = int(np.searchsorted(self.hi, psi, side="right"))
        if i >= len(self) or not self.lo[i] <= psi:
            raise ValueError(f"{psi!r} lies outside the grid [{self.lo[0]}, {self.hi[-1]})")
        return i

    def rows(self):
        for m, p, q, r in zip(self.mid, self.prior_mass, self.posterior_mass, self.rb):
            yield float(m), float(p), float(q), float(r)


def build_grid(base: BayesInferenceBase, target: Target = Target.ABS, anchor: float = 0.0) -> EvidenceGrid:
    """Cells centred at anchor + k*delta covering both prior and posterior.

    For ``Target.ABS`` the first cell is truncated at 0.
    """
    target = Target(target)
    delta = base.delta
    prior = base.prior
    post = posterior_params(base)
    if target is Target.ABS:
        lower = 0.0
        upper = max(abs(prior.mean) + GRID_Z * prior.sd, abs(post.mean) + GRID_Z * post.sd)
    else:
        lower = min(prior.mean - GRID_Z * prior.sd, post.mean - GRID_Z * post.sd)
        upper = max(prior.mean + GRID_Z * prior.sd, post.mean + GRID_Z * post.sd)
    k_lo = math.floor((lower - anchor) / delta + 0.5)
    k_hi = math.ceil((upper - anchor) / delta - 0.5)
    ks = np.arange(k_lo, k_hi + 1)
    edges = anchor + (np.arange(k_lo, k_hi + 2) - 0.5) * delta
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    mid = anchor + ks * delta
    if target is Target.ABS:
        keep = hi > 0
        lo, hi, mid = lo[keep], hi[keep], mid[keep]
        lo[0] = max(lo[0], 0.0)
    prior_mass = cell_masses(lo, hi, prior.mean, prior.sd, target)
    posterior_mass = cell_masses(lo, hi, post.mean, post.sd, target)
    return EvidenceGrid(lo, hi, mid, prior_mass, posterior_mass, target, delta, anchor)


def rb_of_cell(base: BayesInferenceBase, lo: float, hi: float, xbar, target: Target = Target.ABS):
    """Relative belief ratio of the single cell [lo, hi) for each data mean in ``xbar``.

    Agrees with ``build_grid(base.with_xbar(x)).rb`` at that cell, without building the grid.
    """
    prior = base.prior
    prior_mass = float(cell_masses(lo, hi, prior.mean, prior.sd, target))
    if prior_mass < MIN_PRIOR_MASS:
        raise ValueError("cell has no prior mass")
    mean, sd = posterior_mean_sd(base, xbar)
    return cell_masses(lo, hi, mean, sd, target) / prior_mass


def plausible_region(grid: EvidenceGrid) -> IntervalSet:
    return IntervalSet.from_cells(grid.lo, grid.hi, grid.valid & (grid.rb > 1))


def implausible_region(grid: EvidenceGrid) -> IntervalSet:
    return IntervalSet.from_cells(grid.lo, grid.hi, grid.valid & (grid.rb < 1))


def strength(grid: EvidenceGrid, psi0: float) -> float:
    """Posterior probability of the cells whose ratio is no larger than that of psi0's cell."""
    rb0 = grid.rb[grid.cell_index(psi0)]
    mask = grid.valid & (grid.rb <= rb0)
    return float(grid.posterior_mass[mask].sum())


def credible_region(grid: EvidenceGrid, gamma: float) -> IntervalSet:
    """Highest-ratio cells, ties to smaller psi, until posterior content reaches gamma."""
    idx = np.flatnonzero(grid.valid)
    order = idx[np.lexsort((grid.mid[idx], -grid.rb[idx]))]
    cum = np.cumsum(grid.posterior_mass[order])
    count = min(int(np.searchsorted(cum, gamma, side="left")) + 1, order.size)
    mask = np.zeros(len(grid), dtype=bool)
    mask[order[:count]] = True
    return IntervalSet.from_cells(grid.lo, grid.hi, mask)


class JeffreysLabel(str, Enum):
    BARELY = "barely"
    SUBSTANTIAL = "substantial"
    STRONG = "strong"
    VERY_STRONG = "very_strong"
    DECISIVE = "decisive"
    BARELY_AGAINST = "barely_against"
    SUBSTANTIAL_AGAINST = "substantial_against"
    STRONG_AGAINST = "strong_against"
    VERY_STRONG_AGAINST = "very_strong_against"
    DECISIVE_AGAINST = "decisive_against"


_JEFFREYS_EDGES = (10**0.5, 10.0, 10**1.5, 100.0)
_JEFFREYS_FAVOUR = (
    JeffreysLabel.BARELY,
    JeffreysLabel.SUBSTANTIAL,
    JeffreysLabel.STRONG,
    JeffreysLabel.VERY_STRONG,
    JeffreysLabel.DECISIVE,
)
_JEFFREYS_AGAINST = (
    JeffreysLabel.BARELY_AGAINST,
    JeffreysLabel.SUBSTANTIAL_AGAINST,
    JeffreysLabel.STRONG_AGAINST,
    JeffreysLabel.VERY_STRONG_AGAINST,
    JeffreysLabel.DECISIVE_AGAINST,
)


def jeffreys_label(bf: float) -> JeffreysLabel:
    """Jeffreys' verbal scale; bands are closed on the right, and bf < 1 is read through 1/bf."""
    if not bf > 0:
        raise ValueError("Bayes factor must be positive")
    against = bf < 1
    x = 1.0 / bf if against else bf
    band = sum(x > edge for edge in _JEFFREYS_EDGES)
    return (_JEFFREYS_AGAINST if against else _JEFFREYS_FAVOUR)[band]


def bayes_factor(prior_mass, posterior_mass):
    """Posterior odds over prior odds. A posterior probability of 1 gives inf with a warning."""
    prior = np.asarray(prior_mass, dtype=float)
    post = np.asarray(posterior_mass, dtype=float)
    if np.any((prior <= 0) | (prior >= 1)):
        raise ValueError("prior probability must lie strictly between 0 and 1")
    if np.any((post < 0) | (post > 1)):
        raise ValueError("posterior probability must lie in [0, 1]")
    if np.any(post == 1):
        warnings.warn("posterior probability 1 gives an infinite Bayes factor", RuntimeWarning, stacklevel=2)
    with np.errstate(divide="ignore"):
        bf = (post / (1.0 - post)) / (prior / (1.0 - prior))
    return float(bf) if bf.ndim == 0 else bf


def bf_rb_log_ratio(prior_mass, posterior_mass):
    """log(BF / RB) = log(1 - prior) - log(1 - posterior), exact in sign even for tiny masses."""
    return np.log1p(-np.asarray(prior_mass, dtype=float)) - np.log1p(-np.asarray(posterior_mass, dtype=float))


@dataclass(frozen=True)
class BayesFactorLimit:
    limit: float
    eps: tuple[float, ...]
    bf: tuple[float, ...]


def _prior_density(base: BayesInferenceBase, psi0: float, target: Target) -> float:
    pr = base.prior
    if target is Target.ABS:
        if psi0 < 0:
            return 0.0
        return float(normal_pdf(psi0, pr.mean, pr.sd) + normal_pdf(-psi0, pr.mean, pr.sd))
    return float(normal_pdf(psi0, pr.mean, pr.sd))


def bayes_factor_limit(
    base: BayesInferenceBase,
    psi0: float,
    eps: Sequence[float] = (0.4, 0.2, 0.1, 0.05, 0.01),
    target: Target = Target.ABS,
) -> BayesFactorLimit:
    """Bayes factors of shrinking neighbourhoods [psi0 - eps, psi0 + eps) and their limit.

    The limit is extrapolated by fitting a quadratic in eps through the three
    smallest neighbourhoods and reading it off at eps = 0.
    """
    target = Target(target)
    if not _prior_density(base, psi0, target) > 0:
        raise ValueError(f"prior density of the parameter vanishes at {psi0!r}")
    eps = tuple(sorted((float(e) for e in eps), reverse=True))
    if len(eps) < 3 or eps[-1] <= 0:
        raise ValueError("need at least three positive neighbourhood sizes")
    pr, post = base.prior, posterior_params(base)
    bfs = []
    for e in eps:
        lo, hi = psi0 - e, psi0 + e
        if target is Target.ABS:
            lo = max(lo, 0.0)
        p0 = float(cell_masses(lo, hi, pr.mean, pr.sd, target))
        p1 = float(cell_masses(lo, hi, post.mean, post.sd, target))
        bfs.append(bayes_factor(p0, p1))
    x = np.array(eps[-3:])
    coef = np.polyfit(x, np.array(bfs[-3:]), 2)
    return BayesFactorLimit(float(coef[-1]), eps, tuple(bfs))


@dataclass(frozen=True)
class EvidenceReport:
    psi0: float
    estimate: float
    plausible: IntervalSet
    plausible_content: float
    rb_at_hypothesis: float
    strength: float
    credible: IntervalSet
    gamma: float
    credible_in_plausible: bool
    bf_at_hypothesis: float
    jeffreys_label: JeffreysLabel

    def to_dict(self) -> dict:
        return {
            "psi0": self.psi0,
            "estimate": self.estimate,
            "plausible": self.plausible.to_list(),
            "plausible_content": self.plausible_content,
            "rb_at_hypothesis": self.rb_at_hypothesis,
            "strength": self.strength,
            "credible": self.credible.to_list(),
            "gamma": self.gamma,
            "credible_in_plausible": self.credible_in_plausible,
            "bf_at_hypothesis": self.bf_at_hypothesis,
            "jeffreys_label": self.jeffreys_label.value,
        }


def evidence_report(grid: EvidenceGrid, psi0: float, gamma: float = 0.5) -> EvidenceReport:
    """Estimate, plausible region and its content, and the evidence about psi0 with its strength.

    The gamma-credible region is always returned. ``credible_in_plausible``
    says whether it stays inside the plausible region. When it does not, the
    region contains values with evidence against them.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    i0 = grid.cell_index(psi0)
    if not grid.valid[i0]:
        raise ValueError(f"the cell containing {psi0!r} has no prior mass")
    rb_valid = np.where(grid.valid, grid.rb, -np.inf)
    estimate = float(grid.mid[int(np.argmax(rb_valid))])
    in_favour = grid.valid & (grid.rb > 1)
    plausible = IntervalSet.from_cells(grid.lo, grid.hi, in_favour)
    credible = credible_region(grid, gamma)
    bf = bayes_factor(grid.prior_mass[i0], grid.posterior_mass[i0])
    return EvidenceReport(
        psi0=float(psi0),
        estimate=estimate,
        plausible=plausible,
        plausible_content=float(grid.posterior_mass[in_favour].sum()),
        rb_at_hypothesis=float(grid.rb[i0]),
        strength=strength(grid, psi0),
        credible=credible,
        gamma=gamma,
        credible_in_plausible=bool(credible.issubset(plausible)) if not credible.empty else True,
        bf_at_hypothesis=bf,
        jeffreys_label=jeffreys_label(bf) if bf > 0 else JeffreysLabel.DECISIVE_AGAINST,
    )


@dataclass(frozen=True)
class UrnEvidence:
    rb: float
    posterior: float
    prior: float


def urn_evidence(N: int, n: int) -> UrnEvidence:
    """One marked ball out of N; we learn it lies in a subset of size n containing the marked one."""
    if not 1 <= n < N:
        raise ValueError("need 1 <= n < N")
    return UrnEvidence(rb=N / n, posterior=1.0 / n, prior=1.0 / N)


def pereira_stern_ev(base: BayesInferenceBase, mu0: float) -> float:
    """Posterior probability of the set where the posterior density of mu is at most its value at mu0."""
    post = posterior_params(base)
    return float(2.0 * normal_sf(abs(mu0 - post.mean) / post.sd))
