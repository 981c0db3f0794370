"""Simulation and design-space exploration for sparse streaming CNN accelerators.

The package models a streaming accelerator whose engines skip zero
activations. It computes sparsity statistics from activation traces, runs
cycle models of single engines and whole layers, predicts performance
analytically, sizes inter-engine buffers and allocates MACs across layers
with simulated annealing.

Main entry points:
    load_network(), vgg16(), resnet18(): Workload descriptions
    load_trace(), generate_synthetic_trace(): Activation traces
    compute_stats(), back_pressure_metric(): Sparsity statistics
    run_engine(): Single-engine cycle model
    simulate_layer(), simulate_network(): Layer pipeline simulation
    layer_latency(), network_objective(): Analytic models
    allocate_macs(), size_buffers(), optimise_network(): Design flow
"""

from .analytic import (
    LayerConfig,
    ThroughputEstimate,
    ThroughputModel,
    dsp_usage,
    engine_throughput,
    feasible,
    layer_latency,
    network_objective,
)
from .dse import (
    AnnealSchedule,
    DesignPoint,
    allocate_macs,
    buffer_lutram_cost,
    optimise_network,
    size_buffers,
)
from .engine_sim import (
    EngineConfig,
    EngineCycleReport,
    expected_ops_per_cycle_oracle,
    run_engine,
    window_cycles,
)
from .netspec import (
    LayerSpec,
    NetworkSpec,
    ResourceBudget,
    layer_workload,
    load_budget,
    load_network,
    resnet18,
    vgg16,
)
from .pipeline_sim import SimReport, simulate_layer, simulate_network
from .trace import (
    SparsityStats,
    SparsityTrace,
    WindowPattern,
    back_pressure_metric,
    compute_stats,
    generate_synthetic_trace,
    instantaneous_sparsity,
    load_trace,
    moving_average,
    save_trace,
)
from .types import (
    ConfigError,
    IndexRangeError,
    InfeasibleDesignError,
    NetworkSpecError,
    SparseStreamError,
    TraceError,
)

__all__ = [
    "AnnealSchedule",
    "ConfigError",
    "DesignPoint",
    "EngineConfig",
    "EngineCycleReport",
    "IndexRangeError",
    "InfeasibleDesignError",
    "LayerConfig",
    "LayerSpec",
    "NetworkSpec",
    "NetworkSpecError",
    "ResourceBudget",
    "SimReport",
    "SparseStreamError",
    "SparsityStats",
    "SparsityTrace",
    "ThroughputEstimate",
    "ThroughputModel",
    "TraceError",
    "WindowPattern",
    "__version__",
    "allocate_macs",
    "back_pressure_metric",
    "buffer_lutram_cost",
    "compute_stats",
    "dsp_usage",
    "engine_throughput",
    "expected_ops_per_cycle_oracle",
    "feasible",
    "generate_synthetic_trace",
    "instantaneous_sparsity",
    "layer_latency",
    "layer_workload",
    "load_budget",
    "load_network",
    "load_trace",
    "moving_average",
    "network_objective",
    "optimise_network",
    "resnet18",
    "run_engine",
    "save_trace",
    "simulate_layer",
    "simulate_network",
    "size_buffers",
    "vgg16",
    "window_cycles",
]

try:
    from ._version import version as __version__
except ImportError:
    __version__ = "0.0.0"
