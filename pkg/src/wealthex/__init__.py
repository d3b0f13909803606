"""Gridded wealth-exchange operator, its fixed point, and an agent-based check."""

__version__ = "0.1.0"

from .grid import DensityField, Grid, discretize, make_grid, mean, moment, normalize  # noqa: E402
from .operator import OperatorConfig, apply_operator, self_convolve, tail_weighted_integral  # noqa: E402
from .fixed_point import IterationConfig, entropy, iterate, probe_stability  # noqa: E402
from .analysis import FitReport, fit_exponential, gini, kl_divergence, ks_statistic, l1_distance  # noqa: E402
from .agents import SimConfig, exchange_step, histogram, run_simulation, sweep  # noqa: E402

__all__ = [
    "DensityField",
    "FitReport",
    "Grid",
    "IterationConfig",
    "OperatorConfig",
    "SimConfig",
    "apply_operator",
    "discretize",
    "entropy",
    "exchange_step",
    "fit_exponential",
    "gini",
    "histogram",
    "iterate",
    "kl_divergence",
    "ks_statistic",
    "l1_distance",
    "make_grid",
    "mean",
    "moment",
    "normalize",
    "probe_stability",
    "run_simulation",
    "self_convolve",
    "sweep",
    "tail_weighted_integral",
]
