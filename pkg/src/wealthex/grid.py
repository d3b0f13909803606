"""Uniform grids on the truncated wealth axis and densities sampled on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridError, NegativeDensityError, NormalizationError

MIN_POINTS = 16
DEFAULT_XMAX = 30.0
DEFAULT_N = 3001
DEFAULT_MASS_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    """Points ``x_i = i*h`` for ``i = 0..n-1`` covering ``[0, x_max]``."""

    x_max: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise GridError(f"n must be an integer, got {self.n!r}")
        if self.n < MIN_POINTS:
            raise GridError(f"grid needs n >= {MIN_POINTS} points, got n={self.n}")
        if not math.isfinite(self.x_max) or self.x_max <= 0:
            raise GridError(f"x_max must be positive and finite, got {self.x_max!r}")
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return self.x_max / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        # linspace pins both endpoints exactly
        return np.linspace(0.0, self.x_max, self.n)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w


def make_grid(x_max: float, n: int) -> Grid:
    return Grid(float(x_max), n)


def trapezoid(values: np.ndarray, h: float) -> float:
    """Composite trapezoid rule on equally spaced samples."""
    values = np.asarray(values, dtype=float)
    return float(h * (values.sum() - 0.5 * (values[0] + values[-1])))


@dataclass(frozen=True, eq=False)
class DensityField:
    """Nonnegative pointwise samples ``f(x_i)`` of a wealth density.

    ``values`` is stored as a read-only float64 copy.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise GridError(f"non-finite density at index {bad}")
        neg = np.flatnonzero(v < 0)
        if neg.size:
            raise NegativeDensityError(int(neg[0]), float(v[neg[0]]), where="index")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def mass(self) -> float:
        return trapezoid(self.values, self.grid.h)

    def is_normalized(self, mass_tol: float = DEFAULT_MASS_TOL) -> bool:
        return abs(self.mass() - 1.0) <= mass_tol

    def __len__(self):
        return self.grid.n


def discretize(g: Grid, f: Callable[[np.ndarray], np.ndarray]) -> DensityField:
    """Sample ``f`` at the grid points. The result is not normalized."""
    x = g.points
    values = np.asarray(f(x), dtype=float)
    if values.shape == ():
        values = np.full(g.n, float(values))
    neg = np.flatnonzero(values < 0)
    if neg.size:
        raise NegativeDensityError(int(neg[0]), float(values[neg[0]]), where="index")
    return DensityField(g, values)


def normalize(f: DensityField) -> DensityField:
    m = f.mass()
    if not math.isfinite(m) or m <= 0:
        raise NormalizationError(f"cannot normalize a field with mass {m!r}")
    return DensityField(f.grid, f.values / m)


def moment(f: DensityField, k: int) -> float:
    """Trapezoid estimate of the k-th raw moment, ``k`` in {0, 1, 2}."""
    if k not in (0, 1, 2):
        raise ValueError(f"moment order must be 0, 1 or 2, got {k!r}")
    if k == 0:
        return f.mass()
    return trapezoid(f.x**k * f.values, f.grid.h)


def mean(f: DensityField) -> float:
    """First moment divided by mass, so it is meaningful for unnormalized fields."""
    return moment(f, 1) / f.mass()


def require_normalized(f: DensityField, mass_tol: float = DEFAULT_MASS_TOL) -> None:
    m = f.mass()
    if abs(m - 1.0) > mass_tol:
        raise NormalizationError(f"field must have unit mass (|mass-1| <= {mass_tol:g}); got mass {m!r}")


def same_grid(a: DensityField, b: DensityField) -> bool:
    return a.grid == b.grid
