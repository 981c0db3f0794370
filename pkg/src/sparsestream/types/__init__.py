"""Types and exceptions for the sparsestream package.

Exceptions:
    SparseStreamError: Base exception.
    NetworkSpecError / NetworkParseError: Invalid or unparsable workloads.
    TraceError / TraceFormatError: Invalid traces or trace files.
    IndexRangeError: Stream or time index out of range.
    ConfigError: Illegal engine, layer or annealing configuration.
    DesignFormatError: Unreadable design document.
    InfeasibleDesignError: Budget cannot hold any design.
    ManifestError: Run directory lacks expected artifacts.

Domain-specific types:
    Cycles, Sparsity, Throughput, ImagesPerCycle, DspCount, LutramCount,
    BufferDepth: Annotated aliases documenting units.
"""

from .domain_types import (
    BufferDepth,
    Cycles,
    DspCount,
    ImagesPerCycle,
    LutramCount,
    Sparsity,
    Throughput,
)
from .exceptions import (
    ConfigError,
    DesignFormatError,
    IndexRangeError,
    InfeasibleDesignError,
    ManifestError,
    NetworkParseError,
    NetworkSpecError,
    SparseStreamError,
    TraceError,
    TraceFormatError,
)

__all__ = [
    "BufferDepth",
    "ConfigError",
    "Cycles",
    "DesignFormatError",
    "DspCount",
    "ImagesPerCycle",
    "IndexRangeError",
    "InfeasibleDesignError",
    "LutramCount",
    "ManifestError",
    "NetworkParseError",
    "NetworkSpecError",
    "Sparsity",
    "SparseStreamError",
    "Throughput",
    "TraceError",
    "TraceFormatError",
]
