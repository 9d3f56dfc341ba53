"""Per-user performance summaries: empirical CDFs, histograms, moments."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError


def _values(values) -> np.ndarray:
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.size == 0:
        raise InvalidParameterError("need at least one value")
    return x


def empirical_cdf(values) -> list[tuple[float, float]]:
    """Right-continuous empirical CDF as ``(x, fraction <= x)`` at each distinct x."""
    x = np.sort(_values(values))
    uniq, counts = np.unique(x, return_counts=True)
    frac = np.cumsum(counts) / x.size
    return [(float(u), float(f)) for u, f in zip(uniq, frac)]


def fraction_below(values, threshold: float) -> float:
    x = _values(values)
    return float(np.mean(x < threshold))


def summary_stats(values) -> tuple[float, float, float]:
    """Mean, population variance and total."""
    x = _values(values)
    return float(x.mean()), float(x.var()), float(x.sum())


def histogram(values, bins=10, value_range=None) -> tuple[np.ndarray, np.ndarray]:
    """Counts and bin edges over the finite values."""
    x = _values(values)
    x = x[np.isfinite(x)]
    return np.histogram(x, bins=bins, range=value_range)


def jain_index(values) -> float:
    x = _values(values)
    s2 = float(np.sum(x * x))
    return float(x.sum() ** 2 / (x.size * s2)) if s2 > 0 else 0.0
