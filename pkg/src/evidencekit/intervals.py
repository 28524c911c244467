from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint half-open intervals [lo, hi)."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev_hi = -np.inf
        for lo, hi in self.intervals:
            if not lo < hi:
                raise ValueError(f"empty or reversed interval [{lo}, {hi})")
            if lo < prev_hi:
                raise ValueError("intervals must be sorted and disjoint")
            prev_hi = hi

    @classmethod
    def single(cls, lo: float, hi: float) -> "IntervalSet":
        return cls(((float(lo), float(hi)),))

    @classmethod
    def from_cells(cls, lo, hi, mask) -> "IntervalSet":
        """Union of the selected grid cells, merging cells that share an edge."""
        lo = np.asarray(lo, dtype=float)[np.asarray(mask, dtype=bool)]
        hi = np.asarray(hi, dtype=float)[np.asarray(mask, dtype=bool)]
        if lo.size == 0:
            return cls()
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        # a new run starts wherever a cell does not touch its predecessor
        starts = np.flatnonzero(np.r_[True, lo[1:] > hi[:-1] + 1e-12 * np.maximum(1.0, np.abs(hi[:-1]))])
        ends = np.r_[starts[1:] - 1, lo.size - 1]
        return cls(tuple((float(lo[s]), float(hi[e])) for s, e in zip(starts, ends)))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def empty(self) -> bool:
        return not self.intervals

    @property
    def lo(self) -> float:
        return self.intervals[0][0]

    @property
    def hi(self) -> float:
        return self.intervals[-1][1]

    def contains(self, x: float) -> bool:
        return any(lo <= x < hi for lo, hi in self.intervals)

    def issubset(self, other: "IntervalSet", tol: float = 1e-9) -> bool:
        return all(
            any(olo - tol <= lo and hi <= ohi + tol for olo, ohi in other.intervals)
            for lo, hi in self.intervals
        )

    def length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]
