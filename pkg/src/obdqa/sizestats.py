"""Building-size percentiles and log-normal size distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import DegenerateDensityError, EmptyInputError
from ._validation import check_areas

DEFAULT_RANKS = (10, 25, 50, 75, 90)
DEFAULT_BINS = 50

HISTOGRAM_COLUMNS = ("bin_low", "bin_high", "count", "fitted_density_at_center")


def percentiles(areas, ranks=DEFAULT_RANKS) -> dict[float, float]:
    """Linear interpolation between order statistics at ``(n - 1) * rank / 100``."""
    a = np.sort(check_areas(areas))
    n = len(a)
    out = {}
    for r in ranks:
        if not 0 <= r <= 100:
            raise ValueError(f"percentile rank out of range: {r}")
        pos = (n - 1) * r / 100.0
        lo = int(math.floor(pos))
        hi = min(lo + 1, n - 1)
        frac = pos - lo
        out[r] = float(a[lo] + (a[hi] - a[lo]) * frac)
    return out


def log_normal_fit(areas) -> tuple[float, float]:
    """Mean and population standard deviation of ``ln(area)``."""
    logs = np.sort(np.log(check_areas(areas, min_samples=2)))
    mu = math.fsum(logs) / len(logs)
    var = math.fsum((logs - mu) ** 2) / len(logs)
    return mu, math.sqrt(var)


def histogram(values, bins: int = DEFAULT_BINS) -> list[tuple[float, float, int]]:
    """Equal-width bins over ``[min, max]``; the last bin includes its right edge.

    A constant sample gets one bin widened to ``value +/- 0.5``.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise EmptyInputError("histogram of no values")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return [(lo - 0.5, lo + 0.5, int(v.size))]
    width = (hi - lo) / bins
    edges = [lo + k * width for k in range(bins)] + [hi]
    idx = np.floor((v - lo) / width).astype(int)
    idx = np.clip(idx, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return [(edges[k], edges[k + 1], int(counts[k])) for k in range(bins)]


def pdf_curve(mu: float, sigma: float, xs) -> np.ndarray:
    """Normal density at each of ``xs``."""
    if not sigma > 0:
        raise DegenerateDensityError(f"normal density needs sigma > 0, got {sigma}")
    x = np.asarray(xs, dtype=float)
    z = (x - mu) / sigma
    return np.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


@dataclass(frozen=True)
class SizeStats:
    percentiles: dict[float, float]
    mu: float
    sigma: float
    n: int
    histogram: list[tuple[float, float, int]]

    def histogram_rows(self) -> list[dict[str, object]]:
        """Histogram of ln-areas with the fitted density at each bin centre."""
        rows = []
        for low, high, count in self.histogram:
            centre = 0.5 * (low + high)
            dens = float(pdf_curve(self.mu, self.sigma, [centre])[0]) if self.sigma > 0 else None
            rows.append(dict(zip(HISTOGRAM_COLUMNS, (low, high, count, dens))))
        return rows


class LogNormalSizeModel(BaseEstimator):
    """Fit a normal curve to log building areas and summarise raw-area percentiles.

    Parameters
    ----------
    bins : int
        Number of equal-width histogram bins over the ln-area range.
    ranks : tuple of float
        Percentile ranks reported on the untransformed areas.
    """

    def __init__(self, bins: int = DEFAULT_BINS, ranks=DEFAULT_RANKS):
        self.bins = bins
        self.ranks = ranks

    def fit(self, X, y=None):
        areas = check_areas(X, min_samples=2)
        self.mu_, self.sigma_ = log_normal_fit(areas)
        self.percentiles_ = percentiles(areas, self.ranks)
        self.histogram_ = histogram(np.log(areas), self.bins)
        self.n_samples_ = len(areas)
        return self

    def score_samples(self, X):
        """Log-density of ``ln(area)`` under the fitted normal."""
        check_is_fitted(self, "mu_")
        logs = np.log(check_areas(X))
        return np.log(pdf_curve(self.mu_, self.sigma_, logs))

    def transform(self, X):
        """Standardised log areas, ``(ln(area) - mu) / sigma``."""
        check_is_fitted(self, "mu_")
        if not self.sigma_ > 0:
            raise DegenerateDensityError("cannot standardise with sigma = 0")
        return (np.log(check_areas(X)) - self.mu_) / self.sigma_

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)

    @property
    def stats_(self) -> SizeStats:
        check_is_fitted(self, "mu_")
        return SizeStats(dict(self.percentiles_), self.mu_, self.sigma_, self.n_samples_,
                         list(self.histogram_))


def size_stats(areas, bins: int = DEFAULT_BINS, ranks=DEFAULT_RANKS) -> SizeStats:
    return LogNormalSizeModel(bins=bins, ranks=ranks).fit(areas).stats_
