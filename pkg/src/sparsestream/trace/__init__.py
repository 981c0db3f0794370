"""Activation sparsity traces and their statistics.

Modules:
    model: WindowPattern and SparsityTrace containers.
    stats: Instantaneous sparsity, moving averages and back pressure.
    synthetic: Seeded synthetic trace generators.
    io: Binary and CSV trace files.
"""

from .io import decode_trace, encode_trace, load_trace, save_trace
from .model import SparsityTrace, WindowPattern
from .stats import (
    SparsityStats,
    back_pressure_metric,
    compute_stats,
    instantaneous_sparsity,
    moving_average,
    rho_sweep,
)
from .synthetic import (
    Constant,
    IidBernoulli,
    MarkovBursty,
    SparsityModel,
    generate_network_traces,
    generate_synthetic_trace,
    parse_model,
)

__all__ = [
    "Constant",
    "IidBernoulli",
    "MarkovBursty",
    "SparsityModel",
    "SparsityStats",
    "SparsityTrace",
    "WindowPattern",
    "back_pressure_metric",
    "compute_stats",
    "decode_trace",
    "encode_trace",
    "generate_network_traces",
    "generate_synthetic_trace",
    "instantaneous_sparsity",
    "load_trace",
    "moving_average",
    "parse_model",
    "rho_sweep",
    "save_trace",
]
