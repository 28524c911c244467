"""Prior-predictive bias of relative belief inferences, estimated by simulation.

Bias against psi0 is the prior probability, given psi0 is true, of not
getting evidence in favour of it. Bias in favour is the largest probability,
over values at least ``delta_sep`` away from psi0, of not getting evidence
against psi0. Both depend on a single grid cell, so each replication
evaluates that cell's posterior mass directly instead of rebuilding the grid.

Simulating "given psi": for psi = |mu| the sign of mu is drawn from the
conditional prior, positive with probability pi(psi) / (pi(psi) + pi(-psi)).
For psi = mu the data mean is drawn from N(psi, sigma0**2 / n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional, Sequence

import numpy as np

from .freq import LocationNormalData, pvalue_location_normal
from .intervals import IntervalSet
from .kernel import RNG_NAME, MonteCarloEstimate, NormalParams, normal_pdf, normal_quantile, normal_sf, rng, run_blocks
from .relbelief import (
    BayesInferenceBase,
    Target,
    bayes_factor,
    cell_bounds,
    cell_masses,
    posterior_mean_sd,
    posterior_params,
)

SUPPORT_TAIL = 1e-6
MAX_CANDIDATES = 2000
_CHUNK = 64


def _sign_prob(prior: NormalParams, psi: float) -> float:
    """P(mu > 0 | |mu| = psi) under the normal prior."""
    up = normal_pdf(psi, prior.mean, prior.sd)
    down = normal_pdf(-psi, prior.mean, prior.sd)
    total = up + down
    if total == 0:
        return 1.0 if prior.mean >= 0 else 0.0
    return float(up / total)


def _draw_xbar(g: np.random.Generator, base: BayesInferenceBase, psi, count: int, target: Target):
    """Data means generated under psi (scalar, or one value per row when psi is a column)."""
    d = base.data
    se = d.sigma0 / math.sqrt(d.n)
    z = g.standard_normal(count)
    if target is Target.IDENTITY:
        return psi + se * z
    u = g.random(count)
    psi = np.asarray(psi, dtype=float)
    p_up = np.vectorize(lambda v: _sign_prob(base.prior, v))(psi) if psi.ndim else _sign_prob(base.prior, float(psi))
    mu = np.where(u < p_up, psi, -psi)
    return mu + se * z


class _Cell:
    """Prior mass of one cell plus a vectorised posterior-mass evaluator; the single-cell view of a grid."""

    def __init__(self, base: BayesInferenceBase, psi: float, target: Target, anchor: float):
        self.lo, self.hi = cell_bounds(psi, base.delta, anchor, target)
        self.base, self.target = base, target
        pr = base.prior
        self.prior_mass = float(cell_masses(self.lo, self.hi, pr.mean, pr.sd, target))
        if not self.prior_mass > 0:
            raise ValueError(f"the cell containing {psi!r} has no prior mass")

    def posterior_mass(self, xbar):
        mean, sd = posterior_mean_sd(self.base, xbar)
        return cell_masses(self.lo, self.hi, mean, sd, self.target)

    def evidence_against_or_none(self, xbar, measure: str):
        """Indicator of 'no evidence in favour' (ratio <= 1) for each data mean."""
        post = self.posterior_mass(xbar)
        if measure == "bf":
            return bayes_factor(self.prior_mass, np.minimum(post, np.nextafter(1.0, 0))) <= 1.0
        return post / self.prior_mass <= 1.0

    def not_against(self, xbar, measure: str):
        """Indicator of 'no evidence against' (ratio >= 1) for each data mean."""
        post = self.posterior_mass(xbar)
        if measure == "bf":
            return bayes_factor(self.prior_mass, np.minimum(post, np.nextafter(1.0, 0))) >= 1.0
        return post / self.prior_mass >= 1.0


def _check_psi(psi0: float, target: Target):
    if target is Target.ABS and psi0 < 0:
        raise ValueError("psi0 = |mu| cannot be negative")


def _against_block(count, seed, *, base, psi0, target, anchor, measure):
    g = rng(seed)
    cell = _Cell(base, psi0, target, anchor)
    xbar = _draw_xbar(g, base, psi0, count, target)
    return (float(np.count_nonzero(cell.evidence_against_or_none(xbar, measure))),)


def bias_against_H(
    base: BayesInferenceBase,
    psi0: float,
    reps: int = 10_000,
    seed: int = 0,
    *,
    target: Target = Target.ABS,
    anchor: float = 0.0,
    measure: str = "rb",
    workers: int = 1,
) -> MonteCarloEstimate:
    """Simulated M(RB(psi0 | X) <= 1 | psi0). ``measure='bf'`` uses the cell Bayes factor instead."""
    target = Target(target)
    _check_psi(psi0, target)
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    _Cell(base, psi0, target, anchor)  # fail early on an empty cell
    task = partial(_against_block, base=base, psi0=psi0, target=target, anchor=anchor, measure=measure)
    (hits,) = run_blocks(task, reps, seed, workers=workers)
    return MonteCarloEstimate.from_count(hits, reps)


def prior_support(base: BayesInferenceBase, target: Target, tail: float = SUPPORT_TAIL) -> tuple[float, float]:
    """Central interval holding all but ``tail`` of the prior for the parameter of interest."""
    pr = base.prior
    half = normal_quantile(1.0 - tail / 2.0) * pr.sd
    if target is Target.ABS:
        return 0.0, max(abs(pr.mean - half), abs(pr.mean + half))
    return pr.mean - half, pr.mean + half


def candidate_grid(
    base: BayesInferenceBase,
    psi0: float,
    delta_sep: float,
    target: Target = Target.ABS,
    max_candidates: int = MAX_CANDIDATES,
) -> tuple[np.ndarray, float]:
    """Alternatives psi0 +/- (delta_sep + j*h) inside the prior support, sorted ascending.

    h = max(delta, delta_sep/10), widened if needed so at most ``max_candidates`` remain.
    The points at exactly delta_sep are always included when they lie in the support.
    """
    lo, hi = prior_support(base, target)
    h = max(base.delta, delta_sep / 10.0)
    reach = max(hi - (psi0 + delta_sep), (psi0 - delta_sep) - lo, 0.0)
    if reach / h + 1 > max_candidates / 2:
        h = reach / (max_candidates / 2 - 1)
    j = np.arange(0, int(math.floor(reach / h)) + 1)
    offsets = delta_sep + j * h
    cands = np.concatenate([psi0 - offsets[::-1], psi0 + offsets])
    cands = cands[(cands >= lo) & (cands <= hi)]
    return cands, h


def _favour_block(count, seed, *, base, cell_psi, candidates, target, anchor, measure):
    cell = _Cell(base, cell_psi, target, anchor)
    hits = np.zeros(candidates.size)
    for start in range(0, candidates.size, _CHUNK):
        chunk = candidates[start : start + _CHUNK]
        # common random numbers: every candidate sees the same standard normals
        xbar = _draw_xbar(rng(seed), base, chunk[:, None], count, target)
        hits[start : start + chunk.size] = cell.not_against(xbar, measure).sum(axis=1)
    return hits


@dataclass(frozen=True)
class InFavourEstimate:
    estimate: MonteCarloEstimate
    sup_attained_at: Optional[float]
    candidate_spacing: float
    n_candidates: int
    empty_candidates: bool


def bias_in_favor_H(
    base: BayesInferenceBase,
    psi0: float,
    delta_sep: float,
    reps: int = 10_000,
    seed: int = 0,
    *,
    target: Target = Target.ABS,
    anchor: float = 0.0,
    measure: str = "rb",
    max_candidates: int = MAX_CANDIDATES,
    workers: int = 1,
) -> InFavourEstimate:
    """Simulated sup over |psi - psi0| >= delta_sep of M(RB(psi0 | X) >= 1 | psi).

    The sup runs over :func:`candidate_grid`. Every candidate reuses the same
    normal draws (common random numbers), so the estimate moves smoothly
    with the inputs. An empty candidate set gives 0 with ``empty_candidates`` set.
    """
    target = Target(target)
    _check_psi(psi0, target)
    if not delta_sep > 0:
        raise ValueError("delta_sep must be positive")
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    _Cell(base, psi0, target, anchor)
    cands, h = candidate_grid(base, psi0, delta_sep, target, max_candidates)
    if cands.size == 0:
        return InFavourEstimate(MonteCarloEstimate(0.0, 0.0, reps), None, h, 0, True)
    task = partial(
        _favour_block, base=base, cell_psi=psi0, candidates=cands, target=target, anchor=anchor, measure=measure
    )
    hits = run_blocks(task, reps, seed, workers=workers)
    best = int(np.argmax(hits))
    return InFavourEstimate(MonteCarloEstimate.from_count(hits[best], reps), float(cands[best]), h, cands.size, False)


@dataclass(frozen=True)
class BiasReport:
    psi0: float
    bias_against: MonteCarloEstimate
    bias_in_favor: MonteCarloEstimate
    delta: float
    delta_sep: float
    reps: int
    seed: int
    sup_attained_at: Optional[float]
    candidate_spacing: float
    n_candidates: int
    rng: str = RNG_NAME

    def to_dict(self) -> dict:
        return {
            "psi0": self.psi0,
            "bias_against": self.bias_against.estimate,
            "bias_against_se": self.bias_against.se,
            "bias_in_favor": self.bias_in_favor.estimate,
            "bias_in_favor_se": self.bias_in_favor.se,
            "delta": self.delta,
            "delta_sep": self.delta_sep,
            "reps": self.reps,
            "seed": self.seed,
            "sup_attained_at": self.sup_attained_at,
            "candidate_spacing": self.candidate_spacing,
            "n_candidates": self.n_candidates,
            "rng": self.rng,
        }


def bias_report(
    base: BayesInferenceBase,
    psi0: float,
    delta_sep: float,
    reps: int = 10_000,
    seed: int = 0,
    *,
    target: Target = Target.ABS,
    anchor: float = 0.0,
    workers: int = 1,
) -> BiasReport:
    against = bias_against_H(base, psi0, reps, seed, target=target, anchor=anchor, workers=workers)
    favour = bias_in_favor_H(base, psi0, delta_sep, reps, seed, target=target, anchor=anchor, workers=workers)
    return BiasReport(
        psi0=psi0,
        bias_against=against,
        bias_in_favor=favour.estimate,
        delta=base.delta,
        delta_sep=delta_sep,
        reps=reps,
        seed=seed,
        sup_attained_at=favour.sup_attained_at,
        candidate_spacing=favour.candidate_spacing,
        n_candidates=favour.n_candidates,
    )


# ---------------------------------------------------------------------------
# Biases for estimation: averages of the hypothesis biases over the prior


def _coverage_cells(base: BayesInferenceBase, target: Target, anchor: float, xbar: np.ndarray):
    """Cell edges wide enough for the prior and every posterior implied by ``xbar``."""
    pr = base.prior
    mean, sd = posterior_mean_sd(base, xbar)
    z = 5.5
    if target is Target.ABS:
        lower = 0.0
        upper = max(abs(pr.mean) + z * pr.sd, float(np.max(np.abs(mean))) + z * sd)
    else:
        lower = min(pr.mean - z * pr.sd, float(np.min(mean)) - z * sd)
        upper = max(pr.mean + z * pr.sd, float(np.max(mean)) + z * sd)
    delta = base.delta
    k_lo = math.floor((lower - anchor) / delta + 0.5)
    k_hi = math.ceil((upper - anchor) / delta - 0.5)
    edges = anchor + (np.arange(k_lo, k_hi + 2) - 0.5) * delta
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    if target is Target.ABS:
        keep = hi > 0
        lo, hi = lo[keep], hi[keep]
        lo[0] = max(lo[0], 0.0)
    return lo, hi


def _estimation_block(count, seed, *, base, delta_sep, inner, target, anchor, max_candidates):
    """Tallies for ``count`` outer draws of the true value from the prior."""
    g = rng(seed)
    pr = base.prior
    tallies = np.zeros(6)
    for _ in range(count):
        mu = pr.mean + pr.sd * g.standard_normal()
        psi = abs(mu) if target is Target.ABS else mu
        cell = _Cell(base, psi, target, anchor)
        xbar = _draw_xbar(g, base, psi, inner, target)

        # counter 1: ratio of the true value's cell
        against = np.count_nonzero(cell.evidence_against_or_none(xbar, "rb")) / inner

        # counter 2: is the true value inside the plausible region built from the whole grid?
        lo, hi = _coverage_cells(base, target, anchor, xbar)
        prior_mass = cell_masses(lo, hi, pr.mean, pr.sd, target)
        mean, sd = posterior_mean_sd(base, xbar)
        post = cell_masses(lo[None, :], hi[None, :], mean[:, None], sd, target)
        in_favour = post > prior_mass[None, :]
        covered = sum(IntervalSet.from_cells(lo, hi, row).contains(psi) for row in in_favour) / inner

        cands, _ = candidate_grid(base, psi, delta_sep, target, max_candidates)
        if cands.size:
            sub_seed = int(g.integers(0, 2**63))
            hits = _favour_block(
                inner, sub_seed, base=base, cell_psi=psi, candidates=cands, target=target, anchor=anchor, measure="rb"
            )
            favour = float(hits.max()) / inner
        else:
            favour = 0.0
        tallies += [against, against**2, covered, covered**2, favour, favour**2]
    return tallies


@dataclass(frozen=True)
class EstimationBias:
    bias_against_E: MonteCarloEstimate
    bias_in_favor_E: MonteCarloEstimate
    pl_coverage: MonteCarloEstimate
    outer_reps: int
    inner_reps: int

    def to_dict(self) -> dict:
        return {
            "bias_against_E": self.bias_against_E.estimate,
            "bias_against_E_se": self.bias_against_E.se,
            "bias_in_favor_E": self.bias_in_favor_E.estimate,
            "bias_in_favor_E_se": self.bias_in_favor_E.se,
            "pl_coverage": self.pl_coverage.estimate,
            "pl_coverage_se": self.pl_coverage.se,
            "outer_reps": self.outer_reps,
            "inner_reps": self.inner_reps,
            "rng": RNG_NAME,
        }


def bias_E(
    base: BayesInferenceBase,
    delta_sep: float,
    outer_reps: int = 100,
    inner_reps: int = 1000,
    seed: int = 0,
    *,
    target: Target = Target.ABS,
    anchor: float = 0.0,
    max_candidates: int = 500,
    workers: int = 1,
) -> EstimationBias:
    """Prior averages of the hypothesis biases, plus the prior coverage of the plausible region.

    ``pl_coverage`` counts, with the full grid, how often the true value lands
    in Pl(X). It should equal ``1 - bias_against_E``, which is counted from the
    true value's cell alone. Standard errors come from the spread of the
    per-draw proportions across the ``outer_reps`` prior draws.
    """
    target = Target(target)
    if outer_reps < 100:
        raise ValueError("outer_reps must be at least 100")
    if not delta_sep > 0:
        raise ValueError("delta_sep must be positive")
    task = partial(
        _estimation_block,
        base=base,
        delta_sep=delta_sep,
        inner=inner_reps,
        target=target,
        anchor=anchor,
        max_candidates=max_candidates,
    )
    t = run_blocks(task, outer_reps, seed, workers=workers, block=10)

    def summarise(total, total_sq):
        mean = total / outer_reps
        var = max(total_sq / outer_reps - mean * mean, 0.0)
        return MonteCarloEstimate(float(mean), math.sqrt(var / (outer_reps - 1)), outer_reps * inner_reps)

    return EstimationBias(
        summarise(t[0], t[1]), summarise(t[4], t[5]), summarise(t[2], t[3]), outer_reps, inner_reps
    )


# ---------------------------------------------------------------------------
# Jeffreys-Lindley sweep

# Posterior mass beyond this many sds is below 1e-30 and is added wholesale.
WINDOW_Z = 11.5


@dataclass(frozen=True)
class LindleyRow:
    tau0: float
    rb: float
    strength: float
    pvalue: float


def window_rb_strength(base: BayesInferenceBase, mu0: float) -> tuple[float, float]:
    """Ratio of mu0's cell and its strength, for psi = mu on the grid anchored at mu0.

    Only cells within WINDOW_Z posterior sds are built. Cells further out
    carry less than 1e-30 posterior mass and have smaller likelihood than
    mu0's cell (which lies inside the window), so their mass goes into the
    strength whole. This gives the full-grid strength at a cost independent
    of the prior width.
    """
    post = posterior_params(base)
    delta = base.delta
    lower = min(post.mean - WINDOW_Z * post.sd, mu0 - delta)
    upper = max(post.mean + WINDOW_Z * post.sd, mu0 + delta)
    k_lo = math.floor((lower - mu0) / delta + 0.5)
    k_hi = math.ceil((upper - mu0) / delta - 0.5)
    edges = mu0 + (np.arange(k_lo, k_hi + 2) - 0.5) * delta
    lo, hi = edges[:-1], edges[1:]
    pr = base.prior
    prior_mass = cell_masses(lo, hi, pr.mean, pr.sd, Target.IDENTITY)
    post_mass = cell_masses(lo, hi, post.mean, post.sd, Target.IDENTITY)
    valid = prior_mass > 0
    rb = np.where(valid, post_mass / np.where(valid, prior_mass, 1.0), np.nan)
    i0 = int(np.searchsorted(hi, mu0, side="right"))
    rb0 = rb[i0]
    outside = normal_sf((post.mean - lo[0]) / post.sd) + normal_sf((hi[-1] - post.mean) / post.sd)
    strength = float(post_mass[valid & (rb <= rb0)].sum() + outside)
    return float(rb0), strength


def lindley_sweep(
    data: LocationNormalData, mu0: float, tau0_list: Sequence[float], delta: float = 0.01
) -> list[LindleyRow]:
    """Evidence about mu = mu0 under N(mu0, tau0**2) priors of growing width, next to the fixed p-value."""
    p = pvalue_location_normal(data, mu0)
    rows = []
    for tau0 in tau0_list:
        base = BayesInferenceBase(data, NormalParams(mu0, float(tau0)), delta)
        rb0, s = window_rb_strength(base, mu0)
        rows.append(LindleyRow(float(tau0), rb0, s, p))
    return rows
