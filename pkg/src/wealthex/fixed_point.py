"""Picard iteration of the operator and a perturbation probe around the exponential."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import kl_divergence, l1_distance, sup_distance
from .errors import NegativeDensityError, WealthExError
from .grid import (
    DEFAULT_N,
    DEFAULT_XMAX,
    DensityField,
    Grid,
    make_grid,
    mean,
    moment,
    normalize,
    require_normalized,
    trapezoid,
)
from .operator import OperatorConfig, apply_operator
from .shapes import exponential_field

CONVERGED = "converged"
MAX_ITER = "max_iter"


@dataclass(frozen=True)
class IterationConfig:
    max_iter: int = 200
    eps: float = 1e-10
    record_trace: bool = True

    def __post_init__(self):
        if not (isinstance(self.max_iter, int) and self.max_iter >= 1):
            raise WealthExError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")
        if not self.eps > 0:
            raise WealthExError(f"eps must be positive, got {self.eps!r}")


@dataclass(frozen=True)
class IterationRecord:
    n: int
    l1_prev: float
    l1_exp: float
    mass: float
    mean: float
    entropy: float
    sup_prev: float = math.nan
    kl_exp: float = math.nan


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    status: str = MAX_ITER
    iterations: int = 0

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def entropy(f: DensityField) -> float:
    """Trapezoid estimate of ``-∫ f ln f`` with ``0 ln 0 = 0``."""
    v = f.values
    integrand = np.zeros_like(v)
    pos = v > 0
    integrand[pos] = -v[pos] * np.log(v[pos])
    return trapezoid(integrand, f.grid.h)


def iterate(
    f0: DensityField,
    op_cfg: OperatorConfig | None = None,
    it_cfg: IterationConfig | None = None,
) -> tuple[DensityField, IterationTrace]:
    """Apply the operator until successive iterates are within ``eps`` in L1.

    Hitting ``max_iter`` is reported through ``trace.status``, not raised.
    """
    op_cfg = op_cfg or OperatorConfig()
    it_cfg = it_cfg or IterationConfig()
    require_normalized(f0, op_cfg.mass_tol)
    m0 = mean(f0)
    if not (math.isfinite(m0) and m0 > 0):
        raise WealthExError(f"starting field needs a finite positive mean, got {m0!r}")
    target = exponential_field(f0.grid, m0)

    trace = IterationTrace()
    f = f0
    for n in range(1, it_cfg.max_iter + 1):
        res = apply_operator(f, op_cfg)
        g = res.field
        step = l1_distance(g, f)
        if it_cfg.record_trace:
            trace.records.append(
                IterationRecord(
                    n=n,
                    l1_prev=step,
                    l1_exp=l1_distance(g, target),
                    mass=res.raw_mass,
                    mean=mean(g),
                    entropy=entropy(g),
                    sup_prev=sup_distance(g, f),
                    kl_exp=kl_divergence(g, target),
                )
            )
        f = g
        trace.iterations = n
        if step < it_cfg.eps:
            trace.status = CONVERGED
            break
    return f, trace


# --- stability probe --------------------------------------------------------


def _laguerre2(x):
    return (1.0 - 2.0 * x + 0.5 * x * x) * np.exp(-x)


def _linear(x):
    return (x - 1.0) * np.exp(-x)


def _bump(x):
    return 2.0 * np.exp(-((x - 2.0) ** 2) / 0.5 - x)


def _dip(x):
    return -np.exp(-((x - 1.0) ** 2) / 0.1)


def _sine(x):
    return np.sin(np.pi * x) * np.exp(-x)


# shapes in units of the mean; the projection removes their mass and mean
MODES = {
    "laguerre2": _laguerre2,
    "bump": _bump,
    "dip": _dip,
    "sine": _sine,
    "linear": _linear,
}


@dataclass
class StabilityReport:
    mode: str
    amplitude: float
    distances: np.ndarray  # L1(f_n, f*) for n = 0..steps
    ratios: np.ndarray  # r_n for n = 1..steps, nan where d_{n-1} is at the floor
    floor: float

    @property
    def geometric_mean(self) -> float:
        r = self.ratios[np.isfinite(self.ratios)]
        if r.size == 0:
            return math.nan
        return float(np.exp(np.mean(np.log(r))))

    @property
    def contracting(self) -> bool:
        r = self.ratios[np.isfinite(self.ratios)]
        return bool(np.all(r < 1.0))


def project_perturbation(delta: np.ndarray, fstar: DensityField) -> np.ndarray:
    """Remove the ``(a + b x) f*`` component so delta has zero mass and mean.

    Solved with trapezoid moments, so the discrete mass and mean of
    ``f* + delta`` equal those of ``f*`` to round-off.
    """
    x, h = fstar.x, fstar.grid.h
    m0, m1, m2 = (moment(fstar, k) for k in (0, 1, 2))
    rhs = np.array([trapezoid(delta, h), trapezoid(x * delta, h)])
    a, b = np.linalg.solve(np.array([[m0, m1], [m1, m2]]), rhs)
    return delta - (a + b * x) * fstar.values


def perturbed_start(amplitude: float, mode: str, fstar: DensityField, mean_wealth: float = 1.0) -> DensityField:
    if mode not in MODES:
        raise WealthExError(f"unknown perturbation mode {mode!r}; choose from {sorted(MODES)}")
    m = mean_wealth
    shape = MODES[mode](fstar.x / m) / m
    delta = project_perturbation(amplitude * shape, fstar)
    if amplitude != 0 and np.max(np.abs(delta)) <= 1e-12 * abs(amplitude) * np.max(np.abs(shape)):
        raise WealthExError(
            f"mode {mode!r} only shifts mass and mean; nothing is left after projection"
        )
    values = fstar.values + delta
    neg = np.flatnonzero(values < 0)
    if neg.size:
        i = int(neg[0])
        err = NegativeDensityError(i, float(values[i]), where="index")
        err.args = (f"{err.args[0]} (x={fstar.x[i]:.4g}); use an amplitude smaller than {amplitude:g}",)
        raise err
    return normalize(DensityField(fstar.grid, values))


def probe_stability(
    amplitude: float,
    mode: str = "laguerre2",
    op_cfg: OperatorConfig | None = None,
    grid: Grid | None = None,
    mean_wealth: float = 1.0,
    steps: int = 10,
    floor: float = 1e-8,
) -> StabilityReport:
    """Contraction ratios ``L1(f_n, f*) / L1(f_{n-1}, f*)`` from a perturbed start."""
    op_cfg = op_cfg or OperatorConfig()
    grid = grid or make_grid(DEFAULT_XMAX * mean_wealth, DEFAULT_N)
    fstar = exponential_field(grid, mean_wealth)
    f = perturbed_start(amplitude, mode, fstar, mean_wealth)
    dist = [l1_distance(f, fstar)]
    for _ in range(steps):
        f = apply_operator(f, op_cfg).field
        dist.append(l1_distance(f, fstar))
    dist = np.array(dist)
    prev = dist[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(prev > floor, dist[1:] / prev, np.nan)
    return StabilityReport(mode, float(amplitude), dist, ratios, floor)
