"""Distances, goodness-of-fit statistics and exponential fits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import GridMismatchError, WealthExError
from .grid import DensityField, Grid, make_grid, mean, trapezoid
from .shapes import exponential_field


@dataclass(frozen=True)
class FitReport:
    """Closeness of a density or sample to its fitted exponential.

    ``kl`` is ``math.inf`` when the fitted exponential vanishes somewhere the
    data does not (see ``kl_infinite``).
    """

    rate_mle: float
    ks: float
    l1: float
    kl: float
    gini: float

    @property
    def kl_infinite(self) -> bool:
        return math.isinf(self.kl)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        return cls(**{k: float(d[k]) for k in ("rate_mle", "ks", "l1", "kl", "gini")})


def _check_grids(f: DensityField, g: DensityField) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"fields live on different grids: {f.grid} vs {g.grid}")


def l1_distance(f: DensityField, g: DensityField) -> float:
    _check_grids(f, g)
    return trapezoid(np.abs(f.values - g.values), f.grid.h)


def sup_distance(f: DensityField, g: DensityField) -> float:
    _check_grids(f, g)
    return float(np.max(np.abs(f.values - g.values)))


def kl_divergence(f: DensityField, g: DensityField) -> float:
    """Trapezoid ``∫ f ln(f/g)``; ``inf`` if g vanishes where f is positive."""
    _check_grids(f, g)
    fv, gv = f.values, g.values
    pos = fv > 0
    if np.any(pos & (gv <= 0)):
        return math.inf
    integrand = np.zeros_like(fv)
    integrand[pos] = fv[pos] * np.log(fv[pos] / gv[pos])
    return trapezoid(integrand, f.grid.h)


def ks_statistic(samples: np.ndarray, rate: float) -> float:
    """Two-sided KS distance between the sample and Exp(rate)."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise WealthExError("KS statistic needs at least one sample")
    if rate <= 0:
        raise WealthExError("rate must be positive")
    if x[0] < 0:
        raise WealthExError("samples must be nonnegative")
    n = x.size
    cdf = -np.expm1(-rate * x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return float(max(d_plus, d_minus))


def gini(samples: np.ndarray) -> float:
    """Mean absolute difference over twice the mean, via the sorted formula."""
    w = np.sort(np.asarray(samples, dtype=float))
    if w.size == 0:
        raise WealthExError("gini needs at least one sample")
    if w[0] < 0:
        raise WealthExError("gini needs nonnegative wealths")
    total = w.sum()
    if not total > 0:
        raise WealthExError("gini undefined for zero total wealth")
    n = w.size
    i = np.arange(1, n + 1)
    return float((2.0 * np.dot(i, w) / (n * total)) - (n + 1) / n)


def _cdf(f: DensityField) -> np.ndarray:
    v, h = f.values, f.grid.h
    cum = np.concatenate(([0.0], np.cumsum(0.5 * h * (v[1:] + v[:-1]))))
    return cum / cum[-1]


def density_gini(f: DensityField) -> float:
    """``1 - (1/mean) ∫ (1 - F)^2 dx`` for a gridded density."""
    surv = 1.0 - _cdf(f)
    return 1.0 - trapezoid(surv**2, f.grid.h) / mean(f)


def density_ks(f: DensityField, rate: float) -> float:
    return float(np.max(np.abs(_cdf(f) + np.expm1(-rate * f.x))))


def fit_exponential(data, grid: Grid | None = None) -> FitReport:
    """Fit rate = 1/mean and score the data against that exponential.

    ``data`` is a DensityField or an array of wealth samples. For samples the
    L1 and KL terms are taken on a histogram; the grid defaults to 30 means
    wide with 301 points.
    """
    if isinstance(data, DensityField):
        m = mean(data)
        if not m > 0:
            raise WealthExError("cannot fit an exponential to a field with zero mean")
        ref = exponential_field(data.grid, m)
        return FitReport(
            rate_mle=1.0 / m,
            ks=density_ks(data, 1.0 / m),
            l1=l1_distance(data, ref),
            kl=kl_divergence(data, ref),
            gini=density_gini(data),
        )

    from .agents import histogram_from_samples

    w = np.asarray(data, dtype=float)
    if w.size == 0:
        raise WealthExError("cannot fit an empty sample")
    m = float(w.mean())
    if not m > 0:
        raise WealthExError("cannot fit an exponential to a sample with zero mean")
    if grid is None:
        grid = make_grid(30.0 * m, 301)
    hist, _ = histogram_from_samples(w, grid)
    ref = exponential_field(grid, m)
    return FitReport(
        rate_mle=1.0 / m,
        ks=ks_statistic(w, 1.0 / m),
        l1=l1_distance(hist, ref),
        kl=kl_divergence(hist, ref),
        gini=gini(w),
    )
