"""Window patterns and multi-stream sparsity traces.

A trace stores, for each of M parallel input streams, T consecutive kernel
windows as boolean non-zero masks of length K_x * K_y. Masks are kept in a
single read-only ``(M, T, K)`` numpy array.
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from sparsestream.types import IndexRangeError, TraceError

BoolArray = npt.NDArray[np.bool_]
IntArray = npt.NDArray[np.int64]

MASK_NDIM = 3


@dataclass(frozen=True)
class WindowPattern:
    """Non-zero mask of one kernel window (True where the activation is non-zero)."""

    nnz_mask: tuple[bool, ...]

    def __post_init__(self) -> None:
        """Reject empty masks."""
        if len(self.nnz_mask) < 1:
            raise TraceError("Window pattern must have at least one element")

    @classmethod
    def from_bits(cls, bits: str) -> "WindowPattern":
        """Build a pattern from a 0/1 string such as ``"101000111"``."""
        if not bits or any(ch not in "01" for ch in bits):
            raise TraceError(f"Mask must be a non-empty 0/1 string, got {bits!r}")
        return cls(tuple(ch == "1" for ch in bits))

    @classmethod
    def from_array(cls, mask: npt.ArrayLike) -> "WindowPattern":
        """Build a pattern from any boolean-convertible 1-D array."""
        return cls(tuple(bool(v) for v in np.asarray(mask, dtype=bool).ravel()))

    def to_bits(self) -> str:
        """Inverse of :meth:`from_bits`."""
        return "".join("1" if bit else "0" for bit in self.nnz_mask)

    @property
    def size(self) -> int:
        """Number of elements in the window (K_x * K_y)."""
        return len(self.nnz_mask)

    @property
    def nnz(self) -> int:
        """Number of non-zero elements."""
        return sum(self.nnz_mask)

    def __len__(self) -> int:
        """Same as :attr:`size`."""
        return self.size


@dataclass(frozen=True, eq=False)
class SparsityTrace:
    """Per-stream time series of window non-zero patterns for one layer.

    Attributes:
        layer: Identifier of the layer the trace was taken from.
        masks: Read-only boolean array of shape ``(M, T, K)``.
    """

    layer: str
    masks: BoolArray

    def __post_init__(self) -> None:
        """Validate the mask array and freeze a private copy of it."""
        masks = np.array(self.masks, dtype=bool, copy=True)
        if masks.ndim != MASK_NDIM:
            raise TraceError(
                f"Trace masks must have shape (streams, length, window), "
                f"got {masks.ndim}D"
            )
        streams, length, window = masks.shape
        if streams < 1:
            raise TraceError("Trace needs at least one stream")
        if length < 1:
            raise TraceError("Trace streams must contain at least one window")
        if window < 1:
            raise TraceError("Window patterns must have at least one element")
        masks.flags.writeable = False
        object.__setattr__(self, "masks", masks)

    @classmethod
    def from_patterns(
        cls, layer: str, streams: Sequence[Sequence[WindowPattern]]
    ) -> "SparsityTrace":
        """Build a trace from per-stream lists of patterns.

        Raises:
            TraceError: If streams differ in length or patterns differ in size.
        """
        if not streams:
            raise TraceError("Trace needs at least one stream")
        lengths = {len(stream) for stream in streams}
        if len(lengths) != 1:
            raise TraceError(f"All streams must have equal length, got {lengths}")
        sizes = {pattern.size for stream in streams for pattern in stream}
        if len(sizes) > 1:
            raise TraceError(f"All patterns must have equal size, got {sizes}")
        masks = np.array(
            [[pattern.nnz_mask for pattern in stream] for stream in streams],
            dtype=bool,
        )
        return cls(layer=layer, masks=masks)

    @property
    def num_streams(self) -> int:
        """Number of streams (M)."""
        return int(self.masks.shape[0])

    @property
    def length(self) -> int:
        """Windows per stream (T)."""
        return int(self.masks.shape[1])

    @property
    def kernel_size(self) -> int:
        """Elements per window (K_x * K_y)."""
        return int(self.masks.shape[2])

    def _check_stream(self, stream: int) -> None:
        if not 0 <= stream < self.num_streams:
            raise IndexRangeError(
                f"Stream index {stream} outside [0, {self.num_streams - 1}]"
            )

    def pattern(self, stream: int, t: int) -> WindowPattern:
        """Pattern of window ``t`` on ``stream``."""
        self._check_stream(stream)
        if not 0 <= t < self.length:
            raise IndexRangeError(f"Time index {t} outside [0, {self.length - 1}]")
        return WindowPattern.from_array(self.masks[stream, t])

    def stream(self, stream: int) -> BoolArray:
        """Masks of one stream as a read-only ``(T, K)`` array."""
        self._check_stream(stream)
        return self.masks[stream]

    def patterns(self, stream: int) -> Iterator[WindowPattern]:
        """Iterate over the patterns of one stream."""
        for mask in self.stream(stream):
            yield WindowPattern.from_array(mask)

    def nnz_counts(self) -> IntArray:
        """Non-zero count of every window, shape ``(M, T)``."""
        return self.masks.sum(axis=2, dtype=np.int64)

    def zero_counts(self) -> IntArray:
        """Zero count of every window, shape ``(M, T)``."""
        return self.kernel_size - self.nnz_counts()

    def sparsity_series(self) -> npt.NDArray[np.float64]:
        """Instantaneous sparsity s_m(t) of every window, shape ``(M, T)``."""
        return self.zero_counts() / self.kernel_size

    def tile(self, length: int) -> "SparsityTrace":
        """Return a trace of ``length`` windows per stream by cyclic reuse."""
        if length < 1:
            raise TraceError(f"Tiled length must be >= 1, got {length}")
        if length == self.length:
            return self
        index = np.arange(length) % self.length
        return SparsityTrace(layer=self.layer, masks=self.masks[:, index, :])

    def select_streams(self, streams: Sequence[int]) -> "SparsityTrace":
        """Return a trace restricted to the given stream indices."""
        for stream in streams:
            self._check_stream(stream)
        return SparsityTrace(layer=self.layer, masks=self.masks[list(streams)])

    def __eq__(self, other: Any) -> bool:
        """Traces are equal when layer names and all masks match."""
        if not isinstance(other, SparsityTrace):
            return NotImplemented
        return self.layer == other.layer and np.array_equal(self.masks, other.masks)

    def __hash__(self) -> int:
        """Hash on the layer name and shape."""
        return hash((self.layer, self.masks.shape))
