"""Random pairwise exchange: pool two wealths and split the pool uniformly.

Wealths are kept on a power-of-two lattice ``k * quantum`` sized so that the
population total fits in 53 bits. Every pair sum and every partial sum of the
population is then exact in float64, which makes total wealth invariant at
the bit level under any summation order.

Random numbers come from numpy's ``PCG64`` generator seeded with the
configured 64-bit seed. Each sweep draws one permutation of the agents and
then one uniform per pair, in that order.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .analysis import gini, ks_statistic
from .errors import WealthExError
from .grid import DensityField, Grid, normalize

RNG_NAME = "numpy.random.PCG64"
MAX_CLIPPED = 0.01


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def quantum_for(total: float) -> float:
    """Smallest power of two that keeps ``total`` within 52 bits of mantissa."""
    if total <= 0:
        return 2.0**-52
    return 2.0 ** (math.ceil(math.log2(total)) - 52)


def snap(w: np.ndarray, quantum: float) -> np.ndarray:
    return np.floor(np.asarray(w, dtype=float) / quantum) * quantum


def exchange_step(w_i: float, w_j: float, eps: float, quantum: float | None = None) -> tuple[float, float]:
    """Pool ``w_i + w_j`` and hand the fraction ``eps`` to the first agent.

    The second share is the pool minus the first, so the pair total is kept.
    With ``quantum`` the first share is rounded down to the wealth lattice.
    """
    if not 0.0 <= eps <= 1.0:
        raise WealthExError(f"split fraction must lie in [0, 1], got {eps!r}")
    if w_i < 0 or w_j < 0:
        raise WealthExError("wealths must be nonnegative")
    t = w_i + w_j
    a = eps * t
    if quantum is not None:
        a = math.floor(a / quantum) * quantum
    return a, t - a


@dataclass
class InitialWealth:
    kind: str  # "equal", "uniform" or "exp"
    mean: float = 1.0

    def __post_init__(self):
        if self.kind not in ("equal", "uniform", "exp"):
            raise WealthExError(f"unknown initial wealth kind {self.kind!r}")
        if not (math.isfinite(self.mean) and self.mean > 0):
            raise WealthExError(f"initial mean wealth must be positive, got {self.mean!r}")

    @classmethod
    def parse(cls, text: str) -> "InitialWealth":
        """Parse ``equal:m``, ``exp:m`` or ``uniform:0,b`` (mean b/2)."""
        kind, _, arg = text.partition(":")
        try:
            if kind == "uniform":
                lo, hi = (float(v) for v in arg.split(","))
                if lo != 0:
                    raise WealthExError("uniform initial wealth must start at 0")
                return cls("uniform", hi / 2.0)
            if kind in ("equal", "exp"):
                return cls(kind, float(arg) if arg else 1.0)
        except ValueError as exc:
            if isinstance(exc, WealthExError):
                raise
            raise WealthExError(f"cannot parse initial wealth {text!r}") from None
        raise WealthExError(f"unknown initial wealth {text!r}; use equal:m, uniform:0,b or exp:m")

    def spec(self) -> str:
        if self.kind == "uniform":
            return f"uniform:0,{2 * self.mean!r}"
        return f"{self.kind}:{self.mean!r}"


@dataclass
class SimConfig:
    n_agents: int = 100_000
    initial: InitialWealth = field(default_factory=lambda: InitialWealth("equal", 1.0))
    seed: int = 0
    sweeps: int = 1000

    def __post_init__(self):
        if isinstance(self.initial, str):
            self.initial = InitialWealth.parse(self.initial)
        if not (isinstance(self.n_agents, int) and self.n_agents >= 2):
            raise WealthExError(f"need at least 2 agents, got {self.n_agents!r}")
        if not (isinstance(self.sweeps, int) and self.sweeps >= 0):
            raise WealthExError(f"sweeps must be a nonnegative integer, got {self.sweeps!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise WealthExError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial"] = self.initial.spec()
        return d


@dataclass
class Population:
    wealths: np.ndarray
    rng: np.random.Generator
    quantum: float
    sweep_count: int = 0

    @property
    def n(self) -> int:
        return self.wealths.shape[0]

    def total(self) -> float:
        return float(np.sum(self.wealths))


def make_population(cfg: SimConfig) -> Population:
    rng = make_rng(cfg.seed)
    n, m = cfg.n_agents, cfg.initial.mean
    if cfg.initial.kind == "equal":
        raw = np.full(n, m)
    elif cfg.initial.kind == "uniform":
        raw = rng.uniform(0.0, 2.0 * m, n)
    else:
        raw = rng.exponential(m, n)
    q = quantum_for(float(np.sum(raw)) * (1 + 1e-12))
    return Population(snap(raw, q), rng, q)


def sweep(p: Population) -> Population:
    """Every agent trades once with a random partner; odd one out sits still."""
    n = p.n
    perm = p.rng.permutation(n)
    k = n // 2
    first = perm[0 : 2 * k : 2]
    second = perm[1 : 2 * k : 2]
    eps = p.rng.random(k)
    kernels.exchange_pairs(p.wealths, first, second, eps, p.quantum)
    p.sweep_count += 1
    return p


@dataclass(frozen=True)
class EquilibriumReport:
    n_agents: int
    sweeps: int
    mean: float
    rate: float
    ks: float
    gini: float
    total_initial: float
    total_final: float

    @property
    def conserved(self) -> bool:
        return self.total_initial == self.total_final

    def to_dict(self) -> dict:
        return asdict(self)


def equilibrium_report(p: Population, total_initial: float) -> EquilibriumReport:
    m = float(np.mean(p.wealths))
    rate = 1.0 / m
    return EquilibriumReport(
        n_agents=p.n,
        sweeps=p.sweep_count,
        mean=m,
        rate=rate,
        ks=ks_statistic(p.wealths, rate),
        gini=gini(p.wealths),
        total_initial=total_initial,
        total_final=p.total(),
    )


def run_simulation(cfg: SimConfig) -> tuple[Population, EquilibriumReport]:
    p = make_population(cfg)
    total0 = p.total()
    for _ in range(cfg.sweeps):
        sweep(p)
    return p, equilibrium_report(p, total0)


class Histogram(NamedTuple):
    field: DensityField
    clipped: float  # fraction of agents beyond x_max


def raw_histogram(samples: np.ndarray, g: Grid) -> tuple[DensityField, float]:
    """Bin samples into cells ``[x_i - h/2, x_i + h/2)`` on ``[0, x_max]``.

    The end cells are half-width, matching the trapezoid weights, so the
    trapezoid mass of the result is the fraction of samples on the grid.
    Returns the unnormalized density and the clipped fraction.
    """
    w = np.asarray(samples, dtype=float)
    if w.size == 0:
        raise WealthExError("histogram needs at least one sample")
    h = g.h
    inside = w <= g.x_max
    clipped = 1.0 - np.count_nonzero(inside) / w.size
    idx = np.clip(np.floor(w[inside] / h + 0.5).astype(np.int64), 0, g.n - 1)
    counts = np.bincount(idx, minlength=g.n).astype(float)
    widths = np.full(g.n, h)
    widths[0] = widths[-1] = 0.5 * h
    return DensityField(g, counts / (w.size * widths)), float(clipped)


def histogram_from_samples(samples: np.ndarray, g: Grid, max_clipped: float = MAX_CLIPPED) -> Histogram:
    raw, clipped = raw_histogram(samples, g)
    if clipped > max_clipped:
        raise WealthExError(
            f"{clipped:.2%} of the wealth samples lie beyond x_max={g.x_max:g}; use a larger x_max"
        )
    return Histogram(normalize(raw), clipped)


def histogram(p: Population, g: Grid) -> Histogram:
    return histogram_from_samples(p.wealths, g)
