"""Closed-form performance and resource models.

Per layer the accelerator holds N_I x N_O engines with k MACs each. The
models here predict:

- DSP usage ``N_I * N_O * k``;
- engine throughput in windows per cycle, either the linear estimate
  ``min(1, k / ((1 - s) * K))`` or the exact binomial expectation;
- layer latency ``H_O * W_O * (C_I / N_I) * (C_O / N_O) / min theta``,
  where the slowest engine dictates;
- the network objective, the smallest per-layer rate ``B / latency``;
- LUTRAM used by the input buffers.

Everything is a pure function of its arguments.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import cast

from .const import LUTRAM_DEPTH_STEP, LUTRAM_STEP, LUTRAM_STREAM_GROUP
from .engine_sim import EngineConfig, dense_ops_per_cycle, expected_ops_per_cycle_oracle
from .netspec import LayerSpec, NetworkSpec, ResourceBudget
from .trace import SparsityStats
from .types import ConfigError, DspCount, ImagesPerCycle, LutramCount, Throughput


class ThroughputModel(str, Enum):
    """How engine throughput is predicted from mean sparsity."""

    EQ2 = "eq2"
    ORACLE = "oracle"

    def __str__(self) -> str:
        """Return the command-line spelling."""
        return self.value


@dataclass(frozen=True)
class LayerConfig:
    """Parallelism, MAC count and buffer depth of one layer.

    Attributes:
        n_i: Input-channel parallelism (engines per column).
        n_o: Output-channel parallelism (engine columns).
        k: MACs per engine.
        buffer_depth: Windows buffered per input stream (0 = direct handshake).
    """

    n_i: int
    n_o: int
    k: int
    buffer_depth: int = 0

    def __post_init__(self) -> None:
        """Check that every field is a positive integer (depth may be 0)."""
        for name in ("n_i", "n_o", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
        depth = self.buffer_depth
        if isinstance(depth, bool) or not isinstance(depth, int) or depth < 0:
            raise ConfigError(f"buffer_depth must be an integer >= 0, got {depth!r}")

    def validate_for(self, layer: LayerSpec) -> None:
        """Check folding divisibility and the MAC bound against ``layer``.

        Raises:
            ConfigError: If N_I does not divide C_I, N_O does not divide C_O,
                or k exceeds the window size.
        """
        if layer.c_in % self.n_i:
            raise ConfigError(
                f"N_I={self.n_i} does not divide C_I={layer.c_in} of {layer.name}"
            )
        if layer.c_out % self.n_o:
            raise ConfigError(
                f"N_O={self.n_o} does not divide C_O={layer.c_out} of {layer.name}"
            )
        if self.k > layer.kernel_size:
            raise ConfigError(
                f"k={self.k} exceeds the window size {layer.kernel_size} "
                f"of {layer.name}"
            )

    def engine(self, layer: LayerSpec, dense_mode: bool = False) -> EngineConfig:
        """Engine configuration of this layer's S-MVEs."""
        return EngineConfig(layer.k_x, layer.k_y, self.k, dense_mode=dense_mode)

    def with_depth(self, buffer_depth: int) -> "LayerConfig":
        """Copy of this config with another buffer depth."""
        return LayerConfig(self.n_i, self.n_o, self.k, buffer_depth)


@dataclass(frozen=True)
class ThroughputEstimate:
    """Model prediction for one layer.

    Attributes:
        theta: Throughput of the slowest engine in windows per cycle.
        layer_latency_cycles: Cycles per image.
        network_throughput: Images per cycle if this layer is the bottleneck.
    """

    theta: Throughput
    layer_latency_cycles: float
    network_throughput: ImagesPerCycle


def divisors(n: int) -> tuple[int, ...]:
    """Sorted divisors of ``n``; the legal parallelism values for a channel count."""
    if n < 1:
        raise ValueError(f"Need a positive integer, got {n}")
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return tuple(sorted(set(small + [n // d for d in small])))


def folded_windows(layer: LayerSpec, config: LayerConfig) -> int:
    """Windows each engine processes per image: H_O*W_O*(C_I/N_I)*(C_O/N_O)."""
    config.validate_for(layer)
    return (
        layer.h_out
        * layer.w_out
        * (layer.c_in // config.n_i)
        * (layer.c_out // config.n_o)
    )


def dsp_usage(config: LayerConfig) -> DspCount:
    """DSPs used by one layer: N_I * N_O * k."""
    return config.n_i * config.n_o * config.k


def buffer_lutram_cost(w: int, streams: int) -> LutramCount:
    """LUTRAM of the input buffers of ``streams`` streams at depth ``w``.

    A staircase of 288 units per 32 streams: one step for the handshake
    logic and one more for every started block of 32 windows of depth.
    """
    if w < 0:
        raise ValueError(f"Buffer depth must be >= 0, got {w}")
    if streams < 0:
        raise ValueError(f"Stream count must be >= 0, got {streams}")
    steps = 1 + -(-w // LUTRAM_DEPTH_STEP)
    return LUTRAM_STEP * streams * steps // LUTRAM_STREAM_GROUP


def lutram_usage(config: LayerConfig) -> LutramCount:
    """LUTRAM used by one layer's input buffers (one buffer per input stream)."""
    return buffer_lutram_cost(config.buffer_depth, config.n_i)


def network_dsp(configs: Sequence[LayerConfig]) -> DspCount:
    """Total DSPs of a design."""
    return sum(dsp_usage(config) for config in configs)


def network_lutram(configs: Sequence[LayerConfig]) -> LutramCount:
    """Total buffer LUTRAM of a design."""
    return sum(lutram_usage(config) for config in configs)


def _check_engine(k: int, k_x: int, k_y: int) -> None:
    if not 1 <= k <= k_x * k_y:
        raise ConfigError(f"k must be in [1, {k_x * k_y}], got {k}")


def engine_throughput(k: int, mean_sparsity: float, k_x: int, k_y: int) -> Throughput:
    """Linear throughput estimate ``min(1, k / ((1 - s) * K))`` in windows/cycle.

    Returns 1.0 for a fully sparse stream.
    """
    _check_engine(k, k_x, k_y)
    if not 0.0 <= mean_sparsity <= 1.0:
        raise ConfigError(f"Mean sparsity must be in [0, 1], got {mean_sparsity}")
    work = (1.0 - mean_sparsity) * k_x * k_y
    if work <= 0.0:
        return 1.0
    return min(1.0, k / work)


@lru_cache(maxsize=4096)
def oracle_engine_throughput(
    k: int, mean_sparsity: float, k_x: int, k_y: int
) -> Throughput:
    """Exact expected throughput for i.i.d. zeros, in windows per cycle."""
    _check_engine(k, k_x, k_y)
    return expected_ops_per_cycle_oracle(k_x, k_y, k, mean_sparsity) / (k_x * k_y)


def dense_engine_throughput(
    k: int, k_x: int, k_y: int, model: ThroughputModel = ThroughputModel.EQ2
) -> Throughput:
    """Throughput of the dense baseline engine (no zero skipping)."""
    if model is ThroughputModel.ORACLE:
        _check_engine(k, k_x, k_y)
        return dense_ops_per_cycle(k_x, k_y, k) / (k_x * k_y)
    return engine_throughput(k, 0.0, k_x, k_y)


def theta(
    layer: LayerSpec,
    k: int,
    mean_sparsity: float,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> Throughput:
    """Throughput of one engine of ``layer`` under the selected model."""
    if dense:
        return dense_engine_throughput(k, layer.k_x, layer.k_y, model)
    if model is ThroughputModel.ORACLE:
        return oracle_engine_throughput(k, float(mean_sparsity), layer.k_x, layer.k_y)
    return engine_throughput(k, mean_sparsity, layer.k_x, layer.k_y)


def engine_means(
    per_stream_mean: Sequence[float], config: LayerConfig
) -> tuple[float, ...]:
    """Expand stream means to one value per engine position (m, n).

    Accepts N_I * N_O values, N_I values (shared by every column) or a
    single value (shared by every engine).
    """
    means = tuple(float(m) for m in per_stream_mean)
    engines = config.n_i * config.n_o
    if len(means) == engines:
        return means
    if len(means) == config.n_i:
        return means * config.n_o
    if len(means) == 1:
        return means * engines
    raise ConfigError(
        f"Expected {engines}, {config.n_i} or 1 mean sparsities, got {len(means)}"
    )


def layer_latency(
    layer: LayerSpec,
    config: LayerConfig,
    per_stream_mean: Sequence[float],
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> float:
    """Predicted cycles per image of one layer; the slowest engine dictates.

    Raises:
        ConfigError: If the config does not fold the layer integrally or the
            number of means does not match the engine grid.
    """
    windows = folded_windows(layer, config)
    # theta is monotone in s, so the densest engine is the slowest one.
    densest = min(engine_means(per_stream_mean, config))
    return windows / theta(layer, config.k, densest, model, dense)


def layer_estimate(
    layer: LayerSpec,
    config: LayerConfig,
    per_stream_mean: Sequence[float],
    batch_size: int = 1,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> ThroughputEstimate:
    """Throughput, latency and layer rate of one layer."""
    densest = min(engine_means(per_stream_mean, config))
    slowest = theta(layer, config.k, densest, model, dense)
    latency = folded_windows(layer, config) / slowest
    return ThroughputEstimate(
        theta=slowest,
        layer_latency_cycles=latency,
        network_throughput=batch_size / latency,
    )


def stream_means(stats: SparsityStats, config: LayerConfig) -> tuple[float, ...]:
    """Per-engine means from trace statistics.

    Per-stream means are used when the trace has one stream per engine row
    (or per engine); otherwise the global mean stands for every engine.
    """
    if stats.num_streams in (config.n_i, config.n_i * config.n_o):
        return engine_means(stats.per_stream_mean, config)
    # Filled in by SparsityStats.__post_init__.
    return engine_means((cast(float, stats.global_mean),), config)


def network_objective(
    net: NetworkSpec,
    configs: Sequence[LayerConfig],
    stats: Sequence[SparsityStats],
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> ImagesPerCycle:
    """Network throughput in images per cycle: min over layers of B / latency.

    Raises:
        ConfigError: If the numbers of layers, configs and stats differ.
    """
    if not len(net) == len(configs) == len(stats):
        raise ConfigError(
            f"Need one config and stats per layer: {len(net)} layers, "
            f"{len(configs)} configs, {len(stats)} stats"
        )
    latency = max(
        layer_latency(layer, config, stream_means(layer_stats, config), model, dense)
        for layer, config, layer_stats in zip(net.layers, configs, stats, strict=True)
    )
    return net.batch_size / latency


def feasible(
    configs: Sequence[LayerConfig],
    budget: ResourceBudget,
    layers: Sequence[LayerSpec] | None = None,
) -> bool:
    """Whether a design fits the DSP and LUTRAM budgets.

    Divisibility and the MAC bound are checked too when ``layers`` is given.
    """
    if layers is not None:
        if len(layers) != len(configs):
            return False
        try:
            for layer, config in zip(layers, configs, strict=True):
                config.validate_for(layer)
        except ConfigError:
            return False
    return (
        network_dsp(configs) <= budget.dsp_budget
        and network_lutram(configs) <= budget.lutram_budget
    )
