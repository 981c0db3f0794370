"""Sparsity statistics of activation traces.

Provides the instantaneous sparsity s_m(t), per-stream means and variances,
the moving average of sparsity over w windows and the back-pressure metric
rho_w used for buffer sizing.

Moving averages are taken over exactly w samples (j .. j+w-1) and the
expectation in rho_w is the mean over all sliding start positions. Window
sums are accumulated on integer zero counts so that constant traces give
exactly zero back pressure.
"""

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from sparsestream.types import IndexRangeError, Sparsity, TraceError

from .model import IntArray, SparsityTrace

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class SparsityStats:
    """Summary statistics of a trace.

    Attributes:
        per_stream_mean: Mean sparsity s̄_m of every stream.
        per_stream_variance: Population variance of s_m(t) of every stream.
        global_mean: Workload-weighted mean of the per-stream means; the plain
            mean of the means when omitted.
    """

    per_stream_mean: tuple[float, ...]
    per_stream_variance: tuple[float, ...] = field(default=())
    global_mean: float | None = None

    def __post_init__(self) -> None:
        """Fill in defaults and validate ranges."""
        if not self.per_stream_mean:
            raise TraceError("Statistics need at least one stream")
        means = tuple(float(m) for m in self.per_stream_mean)
        for mean in means:
            if not 0.0 <= mean <= 1.0:
                raise TraceError(f"Mean sparsity must be in [0, 1], got {mean}")
        variances = tuple(float(v) for v in self.per_stream_variance) or tuple(
            0.0 for _ in means
        )
        if len(variances) != len(means):
            raise TraceError("Need one variance per stream")
        if any(v < 0.0 for v in variances):
            raise TraceError("Variances must be non-negative")
        global_mean = (
            float(np.mean(means)) if self.global_mean is None else self.global_mean
        )
        if not 0.0 <= global_mean <= 1.0:
            raise TraceError(f"Global mean must be in [0, 1], got {global_mean}")
        object.__setattr__(self, "per_stream_mean", means)
        object.__setattr__(self, "per_stream_variance", variances)
        object.__setattr__(self, "global_mean", float(global_mean))

    @classmethod
    def uniform(cls, mean: Sparsity, streams: int = 1) -> "SparsityStats":
        """Statistics of ``streams`` streams that all have mean sparsity ``mean``."""
        return cls(per_stream_mean=tuple(float(mean) for _ in range(streams)))

    @property
    def num_streams(self) -> int:
        """Number of streams described."""
        return len(self.per_stream_mean)

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly representation."""
        return {
            "per_stream_mean": list(self.per_stream_mean),
            "per_stream_variance": list(self.per_stream_variance),
            "global_mean": self.global_mean,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SparsityStats":
        """Inverse of :meth:`to_dict`; ``global_mean`` and variances are optional."""
        try:
            return cls(
                per_stream_mean=tuple(data["per_stream_mean"]),
                per_stream_variance=tuple(data.get("per_stream_variance", ())),
                global_mean=data.get("global_mean"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TraceError(f"Invalid statistics document: {e}") from e


def instantaneous_sparsity(trace: SparsityTrace, stream: int, t: int) -> float:
    """Zero fraction of window ``t`` on ``stream``.

    Raises:
        IndexRangeError: If either index is outside the trace.
    """
    pattern = trace.pattern(stream, t)
    return (pattern.size - pattern.nnz) / pattern.size


def compute_stats(trace: SparsityTrace) -> SparsityStats:
    """Per-stream mean and population variance of s_m(t)."""
    if trace.length < 1:
        raise TraceError("Cannot compute statistics of an empty trace")
    zeros = trace.zero_counts()
    denominator = trace.length * trace.kernel_size
    means = zeros.sum(axis=1) / denominator
    variances = np.var(trace.sparsity_series(), axis=1)
    # Every stream carries the same number of elements, so the workload
    # weighting reduces to the total zero fraction.
    global_mean = int(zeros.sum()) / (denominator * trace.num_streams)
    return SparsityStats(
        per_stream_mean=tuple(float(m) for m in means),
        per_stream_variance=tuple(float(v) for v in variances),
        global_mean=float(global_mean),
    )


def _check_depth(trace: SparsityTrace, w: int) -> None:
    if isinstance(w, bool) or not isinstance(w, int | np.integer):
        raise TypeError(f"Window size must be an integer, got {type(w).__name__}")
    if w < 1:
        raise ValueError(f"Window size must be >= 1, got {w}")
    if w > trace.length:
        raise ValueError(f"Window size {w} exceeds trace length {trace.length}")


def _window_sums(zeros: IntArray, w: int) -> IntArray:
    """Sliding sums of ``w`` consecutive columns, shape ``(M, T - w + 1)``."""
    padded = np.zeros((zeros.shape[0], zeros.shape[1] + 1), dtype=np.int64)
    np.cumsum(zeros, axis=1, out=padded[:, 1:])
    return padded[:, w:] - padded[:, :-w]


def moving_average(trace: SparsityTrace, stream: int, w: int) -> FloatArray:
    """Moving average ψ_m^w of one stream's sparsity, length T - w + 1.

    Raises:
        IndexRangeError: If ``stream`` is out of range.
        ValueError: If ``w`` is not in [1, T].
    """
    if not 0 <= stream < trace.num_streams:
        raise IndexRangeError(
            f"Stream index {stream} outside [0, {trace.num_streams - 1}]"
        )
    _check_depth(trace, w)
    zeros = trace.zero_counts()[stream : stream + 1]
    return _window_sums(zeros, w)[0] / (w * trace.kernel_size)


def _rho_from_zeros(zeros: IntArray, kernel_size: int, w: int) -> float:
    length = zeros.shape[1]
    sums = _window_sums(zeros, w)
    gaps = sums.max(axis=0) - sums.min(axis=0)
    positions = sums.shape[1]
    moving_gap = int(gaps.sum()) / (positions * w * kernel_size)
    totals = zeros.sum(axis=1)
    mean_gap = int(totals.max() - totals.min()) / (length * kernel_size)
    return moving_gap - mean_gap


def back_pressure_metric(trace: SparsityTrace, w: int) -> float:
    """Back-pressure metric rho_w of a multi-stream trace.

    The mean max-min gap of the streams' moving averages minus the gap of
    their overall means. The signed value is returned without clamping.

    Raises:
        TraceError: If the trace has fewer than two streams.
        ValueError: If ``w`` is not in [1, T].
    """
    if trace.num_streams < 2:  # noqa: PLR2004
        raise TraceError(
            f"Back pressure needs at least 2 streams, got {trace.num_streams}"
        )
    _check_depth(trace, w)
    return _rho_from_zeros(trace.zero_counts(), trace.kernel_size, w)


def rho_sweep(trace: SparsityTrace, depths: Iterable[int]) -> dict[int, float]:
    """rho_w for every depth in ``depths`` (zero counts computed once)."""
    if trace.num_streams < 2:  # noqa: PLR2004
        raise TraceError(
            f"Back pressure needs at least 2 streams, got {trace.num_streams}"
        )
    zeros = trace.zero_counts()
    result: dict[int, float] = {}
    for w in depths:
        _check_depth(trace, w)
        result[w] = _rho_from_zeros(zeros, trace.kernel_size, w)
    return result
