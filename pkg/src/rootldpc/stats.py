"""Confidence intervals and slope fits shared by the simulators."""

from __future__ import annotations

import numpy as np
from scipy import stats


def binomial_ci(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval for ``k`` successes in ``n`` trials."""
    if n <= 0:
        return 0.0, 1.0
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def mean_ci(values: np.ndarray, level: float = 0.95) -> tuple[float, float, float]:
    """Sample mean with a normal-approximation interval."""
    v = np.asarray(values, dtype=float)
    m = float(v.mean())
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
    z = float(stats.norm.ppf(0.5 + level / 2))
    return m, max(0.0, m - z * se), m + z * se


def loglog_slope(ebn0_db, values) -> float:
    """Least-squares slope of ``log10(value)`` against ``ebn0_db / 10``."""
    x = np.asarray(ebn0_db, dtype=float) / 10.0
    y = np.log10(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
