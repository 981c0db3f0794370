"""Design-space exploration.

Modules:
    design: DesignPoint, the search space and JSON/CSV export.
    search: Greedy baseline and exact search for small instances.
    anneal: Simulated-annealing MAC allocation.
    buffers: Buffer-depth sizing from the back-pressure metric.
    optimise: Allocation followed by buffer sizing.
"""

from sparsestream.analytic import buffer_lutram_cost

from .anneal import (
    AnnealResult,
    AnnealSchedule,
    allocate_macs,
    anneal,
    calibrate_temperature,
    load_schedule,
)
from .buffers import BufferSizing, size_buffers
from .design import (
    ConvergenceEntry,
    DesignPoint,
    DesignSpace,
    design_from_dict,
    design_to_dict,
    load_design,
    save_design,
    write_convergence_csv,
)
from .optimise import (
    OptimisationResult,
    fit_streams,
    lutram_shares,
    optimise_network,
    optimise_synthetic,
    size_design,
)
from .search import exhaustive_allocate, greedy_allocate

__all__ = [
    "AnnealResult",
    "AnnealSchedule",
    "BufferSizing",
    "ConvergenceEntry",
    "DesignPoint",
    "DesignSpace",
    "OptimisationResult",
    "allocate_macs",
    "anneal",
    "buffer_lutram_cost",
    "calibrate_temperature",
    "design_from_dict",
    "design_to_dict",
    "exhaustive_allocate",
    "fit_streams",
    "greedy_allocate",
    "load_design",
    "load_schedule",
    "lutram_shares",
    "optimise_network",
    "optimise_synthetic",
    "save_design",
    "size_buffers",
    "size_design",
    "write_convergence_csv",
]
