"""Statistical comparisons: pooled t-tests, bootstrap CIs, correlations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import rankdata

from lexeff import rng

_BOOTSTRAP_CHUNK = 200  # resamples per block, bounds index-matrix memory


class StatsError(ValueError):
    """A sample violates a test's preconditions."""


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_two_sided: float


def t_test_pooled(a, b) -> TTestResult:
    """Student's two-sample t-test with pooled variance, two-sided p.

    The p-value is the regularized incomplete beta evaluation of the t
    distribution's tail mass, accurate to better than 1e-8.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = a.size, b.size
    if n1 < 2 or n2 < 2:
        raise StatsError("each sample needs at least two values")
    df = n1 + n2 - 2
    pooled_var = ((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()
    pooled_var /= df
    if pooled_var == 0.0:
        raise StatsError("degenerate variance: all values identical")
    t = (a.mean() - b.mean()) / math.sqrt(pooled_var * (1.0 / n1 + 1.0 / n2))
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return TTestResult(t=float(t), df=df, p_two_sided=min(p, 1.0))


def bootstrap_ci(sample, statistic: str = "mean", resamples: int = 1000,
                 seed: int = 0, stream=("bootstrap",)) -> tuple[float, float]:
    """Percentile 95% CI of a statistic over seeded bootstrap resamples.

    Resampling uses the toolkit's counter-based streams: resample b draws
    its indices at counters b*n .. b*n+n-1 of the (seed, *stream) stream,
    so results do not depend on evaluation order or chunking.
    """
    sample = np.asarray(sample, dtype=np.float64)
    n = sample.size
    if n == 0:
        raise StatsError("sample is empty")
    if statistic != "mean":
        raise StatsError(f"unsupported statistic {statistic!r}")
    if resamples < 1:
        raise StatsError("resamples must be >= 1")
    key = rng.stream_key(seed, *stream)
    values = np.empty(resamples)
    for start in range(0, resamples, _BOOTSTRAP_CHUNK):
        stop = min(start + _BOOTSTRAP_CHUNK, resamples)
        indices = rng.uniform_indices(key, start * n, (stop - start) * n, n)
        values[start:stop] = sample[indices.reshape(stop - start, n)].mean(axis=1)
    lo, hi = np.quantile(values, [0.025, 0.975])
    return float(lo), float(hi)


def correlation(x, y, kind: str = "pearson") -> float:
    """Sample correlation, Pearson or Spearman (average ranks for ties)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise StatsError("samples must have equal length")
    if x.size < 3:
        raise StatsError("correlation needs at least three values")
    if kind == "spearman":
        x = rankdata(x)
        y = rankdata(y)
    elif kind != "pearson":
        raise StatsError(f"unknown correlation kind {kind!r}")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt((xc ** 2).sum())
    sy = math.sqrt((yc ** 2).sum())
    if sx == 0.0 or sy == 0.0:
        raise StatsError("degenerate variance in correlation input")
    return float((xc @ yc) / (sx * sy))
