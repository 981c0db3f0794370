"""Domain-specific exceptions for the sparsestream toolflow."""

from collections.abc import Sequence


class SparseStreamError(Exception):
    """Base exception for sparsestream errors."""

    ...


class NetworkSpecError(SparseStreamError):
    """A network or budget description violates an invariant.

    Attributes:
        layer: Name (or index) of the offending layer, if any.
        field: Name of the offending field, if any.
    """

    def __init__(
        self, message: str, layer: str | None = None, field: str | None = None
    ) -> None:
        """Initialize with error message and optional location."""
        location = ", ".join(
            part
            for part in (
                f"layer '{layer}'" if layer is not None else "",
                f"field '{field}'" if field is not None else "",
            )
            if part
        )
        super().__init__(f"{message} ({location})" if location else message)
        self.layer = layer
        self.field = field


class NetworkParseError(NetworkSpecError):
    """A network or budget file could not be parsed."""

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        field: str | None = None,
    ) -> None:
        """Initialize with error message and the line/column of the problem."""
        if line is not None:
            message = f"{message} at line {line}, column {column}"
        super().__init__(message, field=field)
        self.line = line
        self.column = column


class TraceError(SparseStreamError):
    """A sparsity trace is malformed or used inconsistently."""

    ...


class TraceFormatError(TraceError):
    """A trace file is unreadable or corrupt."""

    ...


class IndexRangeError(SparseStreamError, IndexError):
    """A stream or time index is outside the trace."""

    ...


class ConfigError(SparseStreamError, ValueError):
    """An engine, layer or annealing configuration is illegal."""

    ...


class InfeasibleDesignError(SparseStreamError):
    """No design fits the resource budget."""

    ...


class DesignFormatError(SparseStreamError):
    """A design document is not valid JSON or lacks a field."""

    ...


class ManifestError(SparseStreamError):
    """A run directory is missing artifacts.

    Attributes:
        missing: Names of the missing artifacts.
    """

    def __init__(self, message: str, missing: Sequence[str] = ()) -> None:
        """Initialize with error message and the missing artifact names."""
        if missing:
            message = f"{message}: {', '.join(missing)}"
        super().__init__(message)
        self.missing = list(missing)
