"""Sorted-sample empirical distribution, the Monte Carlo oracles' output form."""
from __future__ import annotations

import numpy as np


class EmpiricalDistribution:
    """Empirical CDF over a fixed sample with Kolmogorov-Smirnov comparison."""

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float).ravel()
        if samples.size == 0:
            raise ValueError("need at least one sample")
        self.samples = np.sort(samples)
        self.n = self.samples.size

    def cdf(self, x):
        """P(X <= x) under the empirical measure; vectorized."""
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.samples, x, side="right") / self.n

    def mean(self) -> float:
        return float(self.samples.mean())

    def ks_distance(self, cdf) -> float:
        """sup |F(x) - F_n(x)| against a callable right-continuous CDF.

        The supremum against a step function is attained at the sample
        points, approached from either side.  Tied samples are treated
        as one jump; a tie at the sample minimum is taken to be an atom
        shared with the comparison distribution (its left limit there is
        zero), which is how the traveling-distance law behaves.
        """
        vals, counts = np.unique(self.samples, return_counts=True)
        cum = np.cumsum(counts) / self.n
        below = cum - counts / self.n
        f = np.asarray(cdf(vals), dtype=float)
        upper_gap = np.abs(f - cum)
        lower_gap = np.abs(f - below)
        if counts[0] > 1:
            lower_gap[0] = 0.0
        return float(np.max(np.maximum(upper_gap, lower_gap)))

    def to_csv(self, path) -> None:
        """Two-column CSV of the empirical CDF: ``l_m,cdf``."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("l_m,cdf\n")
            upper = np.arange(1, self.n + 1) / self.n
            for value, prob in zip(self.samples, upper):
                fh.write(f"{float(value)!r},{float(prob)!r}\n")

    def __len__(self) -> int:
        return self.n
