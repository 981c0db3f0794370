"""Cycle simulation of a pipelined convolution layer.

Each of the N_I input streams feeds one engine per column through a buffer
of ``w`` windows. The N_I partial results of a window meet at a barrier
before accumulation, so a column only advances when its slowest engine is
done. All N_O columns see the same streams and behave identically; one
column is simulated.

Flow control is credit based. A stream owns ``w + 1`` slots and a window
holds its slot from the cycle it is issued until its barrier fires. With
``A(j)`` the issue cycle, ``F_m(j)`` the cycle engine m finishes window j
and ``B(j)`` the barrier cycle::

    A(j)   = max(A(j-1) + 1, B(j - w - 1))
    F_m(j) = max(A(j), F_m(j-1)) + cycles_m(j)
    B(j)   = max(max_m F_m(j), B(j-1) + 1)

``w = 0`` is the direct handshake: a stream cannot issue a new window
until the previous one has passed the barrier.

Folded layers can need millions of windows per stream. Only the first
``SIMULATION_WINDOW_LIMIT`` are run cycle by cycle and the rest follow at
the steady barrier rate.
"""

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Final, NamedTuple

import numpy as np

from .analytic import (
    LayerConfig,
    ThroughputModel,
    buffer_lutram_cost,
    folded_windows,
    layer_latency,
)
from .const import SIMULATION_WINDOW_LIMIT
from .engine_sim import cycles_from_counts
from .netspec import LayerSpec, NetworkSpec
from .trace import SparsityTrace, rho_sweep
from .types import ConfigError, Cycles, ImagesPerCycle, TraceError
from .utils.logging import setup_logging
from .utils.parallel import parallel_map

logger = setup_logging(__name__)

REPORT_COLUMNS: Final[tuple[str, ...]] = (
    "layer",
    "N_I",
    "N_O",
    "k",
    "w",
    "measured_cycles",
    "model_cycles",
    "stall_cycles",
    "overhead_pct",
    "simulated_windows",
)
BUFFER_SWEEP_COLUMNS: Final[tuple[str, ...]] = (
    "w",
    "lutram",
    "measured_cycles",
    "model_cycles",
    "overhead_pct",
    "rho",
)


@dataclass(frozen=True)
class SimReport:
    """Outcome of simulating one layer.

    Attributes:
        layer: Layer name.
        config: Simulated configuration.
        measured_cycles: Cycle of the last barrier firing.
        model_cycles: Analytic latency rounded up to whole cycles.
        stall_cycles: Cycles beyond the busiest engine's own work.
        simulated_windows: Windows per stream run cycle by cycle; fewer than
            the folded workload when the barrier cycle was extrapolated.
    """

    layer: str
    config: LayerConfig
    measured_cycles: Cycles
    model_cycles: Cycles
    stall_cycles: Cycles
    simulated_windows: int

    @property
    def overhead_fraction(self) -> float:
        """measured / model - 1."""
        return self.measured_cycles / self.model_cycles - 1.0

    @property
    def overhead_pct(self) -> float:
        """Overhead in percent."""
        return 100.0 * self.overhead_fraction

    def row(self) -> tuple[str | int, ...]:
        """CSV row matching ``REPORT_COLUMNS``."""
        return (
            self.layer,
            self.config.n_i,
            self.config.n_o,
            self.config.k,
            self.config.buffer_depth,
            self.measured_cycles,
            self.model_cycles,
            self.stall_cycles,
            f"{self.overhead_pct:.4f}",
            self.simulated_windows,
        )


@dataclass(frozen=True)
class NetworkSimReport:
    """Per-layer reports and the resulting network rate."""

    reports: tuple[SimReport, ...]
    throughput: ImagesPerCycle

    @property
    def bottleneck(self) -> SimReport:
        """Report of the slowest layer."""
        return max(self.reports, key=lambda report: report.measured_cycles)


def _ceil_cycles(value: float) -> int:
    # Absorb float error in latencies that are integral in exact arithmetic.
    return max(1, math.ceil(value - 1e-9 * max(1.0, value)))


def _tiled_sums(values: np.ndarray, total: int) -> np.ndarray:
    """Row sums of ``values`` reused cyclically to ``total`` columns."""
    periods, rest = divmod(total, values.shape[1])
    return periods * values.sum(axis=1) + values[:, :rest].sum(axis=1)


def _tile_columns(values: np.ndarray, total: int) -> np.ndarray:
    return values[:, np.arange(total) % values.shape[1]]


def barrier_times(cycles: np.ndarray, buffer_depth: int) -> np.ndarray:
    """Barrier cycle B(j) of every window of a ``(M, T)`` cycle array."""
    streams, length = cycles.shape
    if buffer_depth == 0:
        # Lockstep: every window waits for the previous barrier.
        return np.cumsum(np.maximum(cycles.max(axis=0), 1))

    credits = buffer_depth + 1
    columns = np.ascontiguousarray(cycles.T, dtype=np.int64)
    barriers = np.empty(length, dtype=np.int64)
    finish = np.zeros(streams, dtype=np.int64)
    issue = -1
    last = 0
    for j in range(length):
        issue += 1
        if j >= credits:
            issue = max(issue, int(barriers[j - credits]))
        np.maximum(finish, issue, out=finish)
        finish += columns[j]
        slowest = int(finish.max())
        last = slowest if slowest > last else last + 1
        barriers[j] = last
    return barriers


def barrier_schedule(cycles: np.ndarray, buffer_depth: int) -> tuple[int, int]:
    """Run the credit recurrence over a ``(M, T)`` array of window cycles.

    Returns:
        The last barrier cycle and the largest per-engine busy time.
    """
    busy = int(cycles.sum(axis=1).max())
    return int(barrier_times(cycles, buffer_depth)[-1]), busy


def folded_cycles(
    cycles: np.ndarray,
    total: int,
    buffer_depth: int,
    limit: int | None = None,
) -> tuple[int, int]:
    """Last barrier cycle of ``cycles`` reused cyclically to ``total`` windows.

    Lockstep buffers and traces whose windows all take the same time have
    closed forms. Otherwise at most ``limit`` windows are simulated, whole
    trace periods where possible, and the remainder is extrapolated at the
    barrier rate of the second half of the simulated windows.

    Returns:
        The barrier cycle and the number of windows actually simulated.
    """
    limit = SIMULATION_WINDOW_LIMIT if limit is None else limit
    period = cycles.shape[1]
    if buffer_depth == 0:
        peaks = np.maximum(cycles.max(axis=0, keepdims=True), 1)
        return int(_tiled_sums(peaks, total)[0]), total
    if np.all(cycles == cycles.flat[0]):
        return total * int(cycles.flat[0]), total
    if total <= limit:
        barriers = barrier_times(_tile_columns(cycles, total), buffer_depth)
        return int(barriers[-1]), total

    periods = limit // period
    if periods >= 2:  # noqa: PLR2004
        simulated, half = periods * period, (periods // 2) * period
    else:
        simulated, half = limit, limit // 2
    barriers = barrier_times(_tile_columns(cycles, simulated), buffer_depth)
    rate = (barriers[-1] - barriers[half - 1]) / (simulated - half)
    return math.ceil(barriers[-1] + rate * (total - simulated)), simulated


def simulate_layer(
    layer: LayerSpec,
    config: LayerConfig,
    trace: SparsityTrace,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> SimReport:
    """Simulate one layer over its folded workload.

    The trace is reused cyclically to H_O*W_O*(C_I/N_I)*(C_O/N_O) windows per
    stream. Busy time and ``model_cycles`` are exact over that workload; the
    barrier cycle is extrapolated beyond ``SIMULATION_WINDOW_LIMIT`` windows
    (see :func:`folded_cycles`).

    Raises:
        TraceError: If the trace does not have N_I streams or its windows do
            not match the layer's kernel.
        ConfigError: If the config does not fold the layer integrally.
    """
    if trace.num_streams != config.n_i:
        raise TraceError(
            f"Layer {layer.name} has N_I={config.n_i} but the trace has "
            f"{trace.num_streams} streams"
        )
    if trace.kernel_size != layer.kernel_size:
        raise TraceError(
            f"Trace windows have {trace.kernel_size} elements, layer "
            f"{layer.name} has {layer.kernel_size}"
        )
    total = folded_windows(layer, config)
    cycles = cycles_from_counts(trace.nnz_counts(), config.engine(layer, dense))
    busy = int(_tiled_sums(cycles, total).max())
    barrier, simulated = folded_cycles(cycles, total, config.buffer_depth)
    # No barrier fires before the busiest engine has done its own work.
    measured = max(barrier, busy)

    zeros = _tiled_sums(trace.zero_counts(), total)
    means = tuple(float(z) / (total * trace.kernel_size) for z in zeros)
    model_cycles = _ceil_cycles(layer_latency(layer, config, means, model, dense))
    report = SimReport(
        layer=layer.name,
        config=config,
        measured_cycles=measured,
        model_cycles=model_cycles,
        stall_cycles=measured - busy,
        simulated_windows=simulated,
    )
    logger.log_event(
        logging.DEBUG,
        "layer simulated",
        layer=layer.name,
        n_i=config.n_i,
        n_o=config.n_o,
        k=config.k,
        w=config.buffer_depth,
        windows=total,
        simulated_windows=simulated,
        measured_cycles=measured,
        model_cycles=model_cycles,
    )
    return report


def simulate_network(
    net: NetworkSpec,
    configs: Sequence[LayerConfig],
    traces: Sequence[SparsityTrace],
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> NetworkSimReport:
    """Simulate every layer independently; the slowest layer sets the rate.

    Layers run on a thread pool capped by ``PASS_DSE_THREADS``.
    """
    if not len(net) == len(configs) == len(traces):
        raise ConfigError(
            f"Need one config and trace per layer: {len(net)} layers, "
            f"{len(configs)} configs, {len(traces)} traces"
        )

    def run(item: tuple[LayerSpec, LayerConfig, SparsityTrace]) -> SimReport:
        return simulate_layer(*item, model=model, dense=dense)

    reports = tuple(
        parallel_map(run, list(zip(net.layers, configs, traces, strict=True)))
    )
    slowest = max(report.measured_cycles for report in reports)
    result = NetworkSimReport(reports=reports, throughput=net.batch_size / slowest)
    logger.log_event(
        logging.INFO,
        "network simulated",
        layers=len(reports),
        bottleneck=result.bottleneck.layer,
        throughput=result.throughput,
    )
    return result


class BufferSweepRow(NamedTuple):
    """Simulated cost and overhead of one buffer depth."""

    w: int
    lutram: int
    measured_cycles: int
    model_cycles: int
    overhead_pct: float
    rho: float


def rank_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation, ties get their average rank.

    Returns 0.0 when either sequence is constant.
    """
    if len(x) != len(y):
        raise ValueError(f"Sequences differ in length: {len(x)} != {len(y)}")
    if len(x) < 2:  # noqa: PLR2004
        raise ValueError("Rank correlation needs at least two points")
    rx = _average_ranks(np.asarray(x, dtype=float))
    ry = _average_ranks(np.asarray(y, dtype=float))
    if np.ptp(rx) == 0.0 or np.ptp(ry) == 0.0:
        return 0.0
    return float(np.corrcoef(rx, ry)[0, 1])


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    ranks[order] = np.arange(len(values), dtype=float)
    for value in np.unique(values):
        tied = values == value
        ranks[tied] = ranks[tied].mean()
    return ranks


def simulate_buffer_sweep(
    layer: LayerSpec,
    config: LayerConfig,
    trace: SparsityTrace,
    depths: Iterable[int],
    model: ThroughputModel = ThroughputModel.EQ2,
) -> tuple[list[BufferSweepRow], float]:
    """Simulate ``layer`` at every buffer depth in ``depths``.

    Returns:
        One row per depth and the rank correlation between rho_w and the
        overhead (0.0 for a single-stream trace, which has no back pressure).
    """
    depths = sorted(set(depths))
    length = folded_windows(layer, config)
    tiled = trace.tile(min(length, SIMULATION_WINDOW_LIMIT))
    usable = [w for w in depths if w >= 1 and w <= tiled.length]
    rho = rho_sweep(tiled, usable) if trace.num_streams > 1 else {}

    def run(w: int) -> SimReport:
        return simulate_layer(layer, config.with_depth(w), trace, model=model)

    reports = parallel_map(run, depths)
    rows = [
        BufferSweepRow(
            w=report.config.buffer_depth,
            lutram=buffer_lutram_cost(report.config.buffer_depth, config.n_i),
            measured_cycles=report.measured_cycles,
            model_cycles=report.model_cycles,
            overhead_pct=report.overhead_pct,
            rho=rho.get(report.config.buffer_depth, 0.0),
        )
        for report in reports
    ]
    correlated = [row for row in rows if row.w in rho]
    correlation = (
        rank_correlation(
            [row.rho for row in correlated], [row.overhead_pct for row in correlated]
        )
        if len(correlated) > 1
        else 0.0
    )
    logger.log_event(
        logging.INFO,
        "buffer sweep finished",
        layer=layer.name,
        depths=depths,
        rank_correlation=correlation,
    )
    return rows, correlation


def write_report_csv(reports: Iterable[SimReport], path: str | Path) -> Path:
    """Write simulation reports with the columns in ``REPORT_COLUMNS``."""
    file_path = Path(path)
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for report in reports:
            writer.writerow(report.row())
    return file_path


def write_buffer_sweep_csv(rows: Iterable[BufferSweepRow], path: str | Path) -> Path:
    """Write buffer-sweep rows with the columns in ``BUFFER_SWEEP_COLUMNS``."""
    file_path = Path(path)
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(BUFFER_SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(
                (
                    row.w,
                    row.lutram,
                    row.measured_cycles,
                    row.model_cycles,
                    f"{row.overhead_pct:.4f}",
                    f"{row.rho:.6f}",
                )
            )
    return file_path
