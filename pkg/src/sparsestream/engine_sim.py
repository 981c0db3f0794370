"""Cycle model of one sparse matrix-vector engine.

The engine checks every element of a K_x x K_y window for zero, routes only
the non-zero products through a crossbar onto k MACs and accumulates over
as many cycles as needed. A window with nnz non-zeros therefore takes
``max(1, ceil(nnz / k))`` cycles; the dense baseline engine always takes
``ceil(K / k)``. Pipeline fill and drain are not counted.

Equivalent OPs/cycle counts every element of a window as work done,
including the skipped zeros, so a dense fully parallel engine reaches K.
"""

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Final, NamedTuple

import numpy as np
import numpy.typing as npt

from .const import DEFAULT_SWEEP_LENGTH, SWEEP_SPARSITY_STEP
from .trace import WindowPattern
from .types import ConfigError, Cycles
from .utils.logging import setup_logging
from .utils.parallel import parallel_map

logger = setup_logging(__name__)

SWEEP_COLUMNS: Final[tuple[str, ...]] = (
    "sparsity",
    "k",
    "ops_per_cycle_sim",
    "ops_per_cycle_oracle",
)


def _check_positive(value: int, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int | np.integer):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ConfigError(f"{name} must be >= 1, got {value}")


@dataclass(frozen=True)
class EngineConfig:
    """Shape and MAC count of one engine.

    Attributes:
        k_x: Kernel width.
        k_y: Kernel height.
        k: MACs in the engine, 1 <= k <= k_x * k_y.
        dense_mode: Model the dense baseline engine (no zero skipping).
    """

    k_x: int
    k_y: int
    k: int
    dense_mode: bool = False

    def __post_init__(self) -> None:
        """Check the MAC count against the window size."""
        _check_positive(self.k_x, "k_x")
        _check_positive(self.k_y, "k_y")
        _check_positive(self.k, "k")
        if self.k > self.kernel_size:
            raise ConfigError(
                f"k={self.k} exceeds the window size {self.kernel_size}"
            )

    @property
    def kernel_size(self) -> int:
        """Elements per window."""
        return self.k_x * self.k_y


@dataclass(frozen=True)
class EngineCycleReport:
    """Outcome of running one engine over a stream of windows."""

    windows_processed: int
    total_cycles: Cycles
    equivalent_ops_per_cycle: float
    cycles_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def mean_window_cycles(self) -> float:
        """Mean cycles spent per window."""
        return self.total_cycles / self.windows_processed

    @property
    def window_cycles_std(self) -> float:
        """Population standard deviation of the per-window cycle count."""
        mean = self.mean_window_cycles
        second = sum(c * c * n for c, n in self.cycles_histogram.items())
        return math.sqrt(max(0.0, second / self.windows_processed - mean * mean))

    def ops_per_cycle_stderr(self, kernel_size: int) -> float:
        """Standard error of the OPs/cycle estimate, first-order in the mean."""
        mean = self.mean_window_cycles
        return (
            kernel_size
            * self.window_cycles_std
            / (mean * mean * math.sqrt(self.windows_processed))
        )


def window_cycles(pattern: WindowPattern, config: EngineConfig) -> int:
    """Cycles the engine spends on one window.

    Raises:
        ConfigError: If the pattern size differs from the engine's window.
    """
    if pattern.size != config.kernel_size:
        raise ConfigError(
            f"Pattern has {pattern.size} elements, engine expects "
            f"{config.kernel_size}"
        )
    if config.dense_mode:
        return -(-config.kernel_size // config.k)
    return max(1, -(-pattern.nnz // config.k))


def cycles_from_counts(
    nnz: npt.ArrayLike, config: EngineConfig
) -> npt.NDArray[np.int64]:
    """Vectorised :func:`window_cycles` over an array of non-zero counts."""
    counts = np.asarray(nnz, dtype=np.int64)
    if config.dense_mode:
        return np.full(counts.shape, -(-config.kernel_size // config.k), np.int64)
    return np.maximum(1, -(-counts // config.k))


def run_engine(
    stream: Sequence[WindowPattern] | npt.NDArray[np.bool_], config: EngineConfig
) -> EngineCycleReport:
    """Run one engine over a stream of windows.

    ``stream`` is either a sequence of patterns or a ``(T, K)`` mask array.

    Raises:
        ConfigError: If the stream is empty or its windows have the wrong size.
    """
    if isinstance(stream, np.ndarray):
        masks = np.asarray(stream, dtype=bool)
        if masks.ndim != 2 or masks.shape[1] != config.kernel_size:  # noqa: PLR2004
            raise ConfigError(
                f"Expected a (T, {config.kernel_size}) mask array, "
                f"got shape {masks.shape}"
            )
        nnz = masks.sum(axis=1, dtype=np.int64)
    else:
        for pattern in stream:
            if pattern.size != config.kernel_size:
                raise ConfigError(
                    f"Pattern has {pattern.size} elements, engine expects "
                    f"{config.kernel_size}"
                )
        nnz = np.fromiter((p.nnz for p in stream), dtype=np.int64, count=len(stream))

    if nnz.size == 0:
        raise ConfigError("Cannot run an engine on an empty stream")

    cycles = cycles_from_counts(nnz, config)
    values, counts = np.unique(cycles, return_counts=True)
    total = int(cycles.sum())
    return EngineCycleReport(
        windows_processed=int(nnz.size),
        total_cycles=total,
        equivalent_ops_per_cycle=nnz.size * config.kernel_size / total,
        cycles_histogram={
            int(v): int(n) for v, n in zip(values, counts, strict=True)
        },
    )


def expected_ops_per_cycle_oracle(k_x: int, k_y: int, k: int, p_zero: float) -> float:
    """Exact equivalent OPs/cycle for i.i.d. zeros with probability ``p_zero``.

    K / E[max(1, ceil(N / k))] with N ~ Binomial(K, 1 - p_zero), summed over
    every N in 0..K.
    """
    config = EngineConfig(k_x, k_y, k)
    if not 0.0 <= p_zero <= 1.0:
        raise ConfigError(f"p_zero must be in [0, 1], got {p_zero}")
    size = config.kernel_size
    p_nonzero = 1.0 - p_zero
    expected = sum(
        math.comb(size, n)
        * p_nonzero**n
        * p_zero ** (size - n)
        * max(1, -(-n // k))
        for n in range(size + 1)
    )
    return size / expected


def dense_ops_per_cycle(k_x: int, k_y: int, k: int) -> float:
    """OPs/cycle of the dense baseline engine, independent of sparsity."""
    config = EngineConfig(k_x, k_y, k, dense_mode=True)
    return config.kernel_size / -(-config.kernel_size // k)


def min_macs_for_peak(
    k_x: int, k_y: int, p_zero: float, fraction: float = 0.99
) -> int:
    """Smallest k whose oracle OPs/cycle reaches ``fraction`` of K_x*K_y."""
    size = k_x * k_y
    for k in range(1, size + 1):
        if expected_ops_per_cycle_oracle(k_x, k_y, k, p_zero) >= fraction * size:
            return k
    return size


def sparsity_grid(step: float = SWEEP_SPARSITY_STEP) -> list[float]:
    """Zero probabilities 0, step, 2*step, ..., 1 rounded to 10 digits."""
    if not 0.0 < step <= 1.0:
        raise ConfigError(f"Sparsity step must be in (0, 1], got {step}")
    count = round(1.0 / step)
    return [round(i * step, 10) for i in range(count + 1) if i * step <= 1.0 + 1e-9]


class SweepRow(NamedTuple):
    """One point of the OPs/cycle against sparsity sweep."""

    sparsity: float
    k: int
    ops_per_cycle_sim: float
    ops_per_cycle_oracle: float


def sweep_engine(
    k_x: int,
    k_y: int,
    ks: Iterable[int],
    sparsities: Iterable[float],
    length: int = DEFAULT_SWEEP_LENGTH,
    seed: int = 0,
) -> list[SweepRow]:
    """Simulated and exact OPs/cycle over a (sparsity, k) grid.

    For every sparsity one i.i.d. stream of ``length`` windows is drawn
    (seeded from ``seed`` and the grid index) and replayed for every k. Rows
    are ordered by sparsity, then k.

    Raises:
        ConfigError: If any k is outside [1, k_x * k_y] or ``length`` < 1.
    """
    k_values = sorted(set(ks))
    configs = [EngineConfig(k_x, k_y, k) for k in k_values]
    if length < 1:
        raise ConfigError(f"Sweep length must be >= 1, got {length}")
    grid = list(sparsities)
    size = k_x * k_y

    def point(item: tuple[int, float]) -> list[SweepRow]:
        index, p_zero = item
        if not 0.0 <= p_zero <= 1.0:
            raise ConfigError(f"Sparsity must be in [0, 1], got {p_zero}")
        rng = np.random.default_rng([seed, index])
        nnz = (rng.random((length, size)) >= p_zero).sum(axis=1, dtype=np.int64)
        rows = []
        for config in configs:
            total = int(cycles_from_counts(nnz, config).sum())
            rows.append(
                SweepRow(
                    sparsity=p_zero,
                    k=config.k,
                    ops_per_cycle_sim=length * size / total,
                    ops_per_cycle_oracle=expected_ops_per_cycle_oracle(
                        k_x, k_y, config.k, p_zero
                    ),
                )
            )
        return rows

    results = parallel_map(point, list(enumerate(grid)))
    rows = [row for block in results for row in block]
    logger.log_event(
        logging.INFO,
        "engine sweep finished",
        points=len(rows),
        k_values=k_values,
        length=length,
        seed=seed,
    )
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], path: str | Path) -> Path:
    """Write sweep rows with the columns in ``SWEEP_COLUMNS``."""
    file_path = Path(path)
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(
                (
                    f"{row.sparsity:.4f}",
                    row.k,
                    f"{row.ops_per_cycle_sim:.6f}",
                    f"{row.ops_per_cycle_oracle:.6f}",
                )
            )
    return file_path
