"""Normal special functions, interval masses and seeded Monte Carlo plumbing.

Everything else in the package is built on these few primitives. Random
streams come from numpy's PCG64 generator (period 2**128); Monte Carlo loops
are split into fixed-size blocks whose seeds are spawned from the caller's
seed with :class:`numpy.random.SeedSequence`, so results do not depend on how
many worker processes consume the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

SQRT2 = math.sqrt(2.0)
RNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"
DEFAULT_BLOCK = 10_000


@dataclass(frozen=True)
class NormalParams:
    mean: float
    sd: float

    def __post_init__(self):
        if not (self.sd > 0 and math.isfinite(self.sd)):
            raise ValueError(f"sd must be positive and finite, got {self.sd!r}")
        if not math.isfinite(self.mean):
            raise ValueError(f"mean must be finite, got {self.mean!r}")

    @property
    def var(self) -> float:
        return self.sd * self.sd


def _check_finite(z):
    if not np.all(np.isfinite(z)):
        raise ValueError("normal_cdf requires finite input")


def _as_output(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def normal_cdf(z):
    """Standard normal cdf, computed from erfc so both tails keep full relative precision."""
    z_arr = np.asarray(z, dtype=float)
    _check_finite(z_arr)
    return _as_output(0.5 * special.erfc(-z_arr / SQRT2), z)


def normal_sf(z):
    """Upper tail 1 - Phi(z) without the cancellation of ``1 - normal_cdf(z)``."""
    z_arr = np.asarray(z, dtype=float)
    _check_finite(z_arr)
    return _as_output(0.5 * special.erfc(z_arr / SQRT2), z)


def normal_quantile(p):
    p_arr = np.asarray(p, dtype=float)
    if not np.all((p_arr > 0) & (p_arr < 1)):
        raise ValueError("normal_quantile requires 0 < p < 1")
    return _as_output(special.ndtri(p_arr), p)


def normal_pdf(x, mean=0.0, sd=1.0):
    z = (np.asarray(x, dtype=float) - mean) / sd
    return np.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))


def interval_mass(lo, hi, mean, sd):
    """P(lo <= X < hi) for X ~ N(mean, sd**2), vectorised.

    Differences are taken on whichever tail the interval sits in, so masses far
    out in either tail are accurate relative to their own size.
    """
    a = (np.asarray(lo, dtype=float) - mean) / sd
    b = (np.asarray(hi, dtype=float) - mean) / sd
    with np.errstate(invalid="ignore"):
        upper = 0.5 * special.erfc(a / SQRT2) - 0.5 * special.erfc(b / SQRT2)
        lower = 0.5 * special.erfc(-b / SQRT2) - 0.5 * special.erfc(-a / SQRT2)
    return np.where(a > 0, upper, lower)


def folded_interval_mass(lo, hi, mean, sd):
    """P(lo <= |X| < hi) for X ~ N(mean, sd**2) and 0 <= lo <= hi."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return interval_mass(lo, hi, mean, sd) + interval_mass(-hi, -lo, mean, sd)


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_normal(params: NormalParams, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    return rng(seed).normal(params.mean, params.sd, size=count)


def derive_seeds(seed: int, count: int) -> list[int]:
    """Child seeds for ``count`` blocks: SeedSequence(seed).spawn(count), one uint64 each."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def block_sizes(reps: int, block: int = DEFAULT_BLOCK) -> list[int]:
    sizes = [block] * (reps // block)
    if reps % block:
        sizes.append(reps % block)
    return sizes


def run_blocks(
    task: Callable[[int, int], Sequence[float]],
    reps: int,
    seed: int,
    *,
    workers: int = 1,
    block: int = DEFAULT_BLOCK,
) -> np.ndarray:
    """Run ``task(count, block_seed)`` over fixed blocks and sum the returned tallies.

    Blocks and their seeds depend only on (reps, seed, block) and partial sums
    are added in block order, so the total is bit-identical for any ``workers``.
    ``task`` must be picklable when ``workers > 1``.
    """
    sizes = block_sizes(reps, block)
    seeds = derive_seeds(seed, len(sizes))
    if workers > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, sizes, seeds))
    else:
        parts = [task(n, s) for n, s in zip(sizes, seeds)]
    total = np.zeros_like(np.asarray(parts[0], dtype=float))
    for part in parts:
        total = total + np.asarray(part, dtype=float)
    return total


@dataclass(frozen=True)
class MonteCarloEstimate:
    """A simulated proportion with its binomial standard error."""

    estimate: float
    se: float
    reps: int

    @classmethod
    def from_count(cls, hits: float, reps: int) -> "MonteCarloEstimate":
        p = hits / reps
        return cls(p, math.sqrt(max(p * (1.0 - p), 0.0) / reps), reps)

    def exceeds(self, value: float, k: float) -> bool:
        return self.estimate > value + k * self.se
