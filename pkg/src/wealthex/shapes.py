"""Pointwise density shapes used as starting fields.

Piecewise shapes take the average of the one-sided limits at a jump, so a jump
that lands on a grid point is integrated to second order by the trapezoid
rule. A jump at the origin keeps the full right-hand value because the origin
is the end of the wealth axis.
"""

from __future__ import annotations

import numpy as np

from .grid import DensityField, Grid, discretize, normalize


def exponential(mean: float = 1.0):
    if mean <= 0:
        raise ValueError("exponential mean must be positive")

    def f(x):
        return np.exp(-np.asarray(x, dtype=float) / mean) / mean

    return f


def uniform(a: float, b: float):
    if not 0 <= a < b:
        raise ValueError(f"uniform needs 0 <= a < b, got a={a}, b={b}")
    height = 1.0 / (b - a)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x > a) & (x < b), height, 0.0)
        out = np.where(x == b, 0.5 * height, out)
        out = np.where(x == a, height if a == 0 else 0.5 * height, out)
        return out

    return f


def triangular(a: float, c: float, b: float):
    """Triangle rising from ``a`` to a peak at ``c`` and falling to ``b``."""
    if not 0 <= a < b or not a <= c <= b:
        raise ValueError(f"triangular needs 0 <= a <= c <= b with a < b, got {a}, {c}, {b}")
    peak = 2.0 / (b - a)

    def f(x):
        x = np.asarray(x, dtype=float)
        rise = peak * (x - a) / (c - a) if c > a else np.zeros_like(x)
        fall = peak * (b - x) / (b - c) if b > c else np.zeros_like(x)
        out = np.where((x >= a) & (x <= c), rise, 0.0)
        out = np.where((x > c) & (x <= b), fall, out)
        if c == a:
            out = np.where(x == a, peak if a == 0 else 0.5 * peak, out)
        if c == b:
            out = np.where(x == b, 0.5 * peak, out)
        return np.maximum(out, 0.0)

    return f


def truncated_gaussian(mu: float, sigma: float):
    """Gaussian restricted to the half-line; normalize after sampling."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * ((x - mu) / sigma) ** 2)

    return f


def mixture(*components):
    """Sum of shapes with weights, given as ``(weight, shape)`` pairs."""

    def f(x):
        return sum(w * g(x) for w, g in components)

    return f


def bimodal(mu1: float = 0.5, mu2: float = 1.5, sigma: float = 0.2):
    return mixture((0.5, truncated_gaussian(mu1, sigma)), (0.5, truncated_gaussian(mu2, sigma)))


def field(g: Grid, shape) -> DensityField:
    """Sample ``shape`` on ``g`` and normalize."""
    return normalize(discretize(g, shape))


def exponential_field(g: Grid, mean: float = 1.0) -> DensityField:
    return field(g, exponential(mean))
