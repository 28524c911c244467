"""e-values for H0: mu = mu0, their running products, and simulated optional stopping."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import partial
from typing import Iterable, Optional

import numpy as np

from .freq import two_sided_pvalue
from .kernel import MonteCarloEstimate, rng, run_blocks

DEFAULT_A = 0.5


class StoppedProcessError(RuntimeError):
    """Raised when an e-process is updated after it has already crossed 1/alpha."""


def e_value_power(pvalue, a: float = DEFAULT_A):
    """Calibrate a p-value into the e-value a * p**(a - 1).

    A p-value of exactly 0 gives ``inf`` and a RuntimeWarning; it cannot arise
    from finite normal data but the formula diverges there.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    p = np.asarray(pvalue, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ValueError("p-values must lie in [0, 1]")
    if np.any(p == 0):
        warnings.warn("p-value of 0 maps to an infinite e-value", RuntimeWarning, stacklevel=2)
    with np.errstate(divide="ignore"):
        e = a * np.power(p, a - 1.0)
    return float(e) if np.ndim(pvalue) == 0 else e


@dataclass(frozen=True)
class EProcessState:
    alpha: float
    running_product: float = 1.0
    step_count: int = 0
    stopped_at: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.running_product < 0:
            raise ValueError("running product cannot be negative")

    @property
    def threshold(self) -> float:
        return 1.0 / self.alpha

    @property
    def stopped(self) -> bool:
        return self.stopped_at is not None


def update(state: EProcessState, e_value: float) -> EProcessState:
    """Multiply in one e-value; records the first step at which the product reaches 1/alpha."""
    if state.stopped:
        raise StoppedProcessError(f"process already stopped at step {state.stopped_at}")
    if not e_value >= 0:
        raise ValueError("e-values must be nonnegative")
    product = state.running_product * e_value
    step = state.step_count + 1
    stopped_at = step if product >= state.threshold else None
    return replace(state, running_product=product, step_count=step, stopped_at=stopped_at)


def run(e_values: Iterable[float], alpha: float) -> EProcessState:
    """Feed a stream until it is exhausted or the process stops."""
    state = EProcessState(alpha)
    for e in e_values:
        state = update(state, e)
        if state.stopped:
            break
    return state


@dataclass(frozen=True)
class SequentialResult:
    rejection: MonteCarloEstimate
    stopped_mean: float
    stopped_se: float
    step_means: np.ndarray
    step_se: np.ndarray


def _sequential_block(count, seed, *, alpha, a, mu0, sigma0, max_steps, track):
    g = rng(seed)
    log_threshold = -math.log(alpha)
    log_prod = np.zeros(count)
    crossed = np.zeros(count, dtype=bool)
    stopped_value = np.zeros(count)
    step_sum = np.zeros(track)
    step_sumsq = np.zeros(track)
    log_a = math.log(a)
    for step in range(max_steps):
        x = g.normal(mu0, sigma0, size=count)
        p = two_sided_pvalue((x - mu0) / sigma0)
        log_prod += log_a + (a - 1.0) * np.log(p)
        if step < track:
            prod = np.exp(log_prod)
            step_sum[step] = prod.sum()
            step_sumsq[step] = (prod * prod).sum()
        new = (~crossed) & (log_prod >= log_threshold)
        stopped_value[new] = np.exp(log_prod[new])
        crossed |= new
    stopped_value[~crossed] = np.exp(log_prod[~crossed])
    return np.concatenate(
        [
            [np.count_nonzero(crossed), stopped_value.sum(), (stopped_value**2).sum()],
            step_sum,
            step_sumsq,
        ]
    )


def simulate_sequential_type1(
    alpha: float,
    a: float = DEFAULT_A,
    mu0: float = 0.0,
    sigma0: float = 1.0,
    max_steps: int = 1000,
    reps: int = 100_000,
    seed: int = 0,
    *,
    track_steps: int = 20,
    workers: int = 1,
) -> SequentialResult:
    """Simulate the e-process under H0 with one observation per step.

    Each observation's own two-sided p-value is calibrated with
    :func:`e_value_power`. ``rejection`` is the fraction of replications whose
    product reaches 1/alpha within ``max_steps``. Also returned: the mean of
    the product stopped at min(first crossing, max_steps), and the mean of the
    unstopped product at each of the first ``track_steps`` steps.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if reps < 10_000:
        raise ValueError("reps must be at least 10**4")
    track = min(track_steps, max_steps)
    task = partial(
        _sequential_block, alpha=alpha, a=a, mu0=mu0, sigma0=sigma0, max_steps=max_steps, track=track
    )
    tallies = run_blocks(task, reps, seed, workers=workers)
    hits, s_sum, s_sumsq = tallies[:3]
    step_sum, step_sumsq = tallies[3 : 3 + track], tallies[3 + track :]

    def mean_se(total, total_sq):
        mean = total / reps
        var = np.maximum(total_sq / reps - mean**2, 0.0)
        return mean, np.sqrt(var / (reps - 1))

    s_mean, s_se = mean_se(s_sum, s_sumsq)
    m, se = mean_se(step_sum, step_sumsq)
    return SequentialResult(MonteCarloEstimate.from_count(hits, reps), float(s_mean), float(s_se), m, se)
