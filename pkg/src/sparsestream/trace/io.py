"""Reading and writing trace files.

Binary container (``.sstr``), all integers little-endian::

    magic    4 bytes  b"SSTR"
    version  u16
    name_len u16, followed by name_len bytes of UTF-8 layer name
    K        u32      elements per window
    M        u32      streams
    T        u64      windows per stream

followed by M*T packed masks, row-major by stream, each ceil(K/8) bytes with
element 0 in the least significant bit.

CSV alternative (``.csv``) for hand-written traces, one row per window::

    stream,t,mask
    0,0,101000111

The layer name of a CSV trace is the file stem.
"""

import csv
import logging
import struct
from pathlib import Path
from typing import Final

import numpy as np

from sparsestream.const import CSV_SUFFIX, TRACE_MAGIC, TRACE_SUFFIX, TRACE_VERSION
from sparsestream.types import TraceError, TraceFormatError
from sparsestream.utils.logging import setup_logging

from .model import SparsityTrace

logger = setup_logging(__name__)

_PREFIX: Final = struct.Struct("<4sHH")
_DIMENSIONS: Final = struct.Struct("<IIQ")
CSV_HEADER: Final[tuple[str, str, str]] = ("stream", "t", "mask")


def _bytes_per_mask(kernel_size: int) -> int:
    return (kernel_size + 7) // 8


def encode_trace(trace: SparsityTrace) -> bytes:
    """Serialise a trace to the binary container format."""
    name = trace.layer.encode("utf-8")
    if len(name) > 0xFFFF:
        raise TraceError(f"Layer name too long for the trace header: {len(name)}")
    header = (
        _PREFIX.pack(TRACE_MAGIC, TRACE_VERSION, len(name))
        + name
        + _DIMENSIONS.pack(trace.kernel_size, trace.num_streams, trace.length)
    )
    flat = trace.masks.reshape(-1, trace.kernel_size)
    packed = np.packbits(flat, axis=1, bitorder="little")
    return header + packed.tobytes()


def decode_trace(data: bytes, source: str = "<bytes>") -> SparsityTrace:
    """Parse the binary container format.

    Raises:
        TraceFormatError: If the header or payload is corrupt or truncated.
    """
    if len(data) < _PREFIX.size:
        raise TraceFormatError(f"{source}: file too short for a trace header")
    magic, version, name_len = _PREFIX.unpack_from(data, 0)
    if magic != TRACE_MAGIC:
        raise TraceFormatError(f"{source}: bad magic {magic!r}")
    if version != TRACE_VERSION:
        raise TraceFormatError(f"{source}: unsupported trace version {version}")

    offset = _PREFIX.size
    if len(data) < offset + name_len + _DIMENSIONS.size:
        raise TraceFormatError(f"{source}: truncated trace header")
    try:
        layer = data[offset : offset + name_len].decode("utf-8")
    except UnicodeDecodeError as e:
        raise TraceFormatError(f"{source}: layer name is not UTF-8") from e
    offset += name_len
    kernel_size, streams, length = _DIMENSIONS.unpack_from(data, offset)
    offset += _DIMENSIONS.size

    if kernel_size < 1 or streams < 1 or length < 1:
        raise TraceFormatError(
            f"{source}: empty trace dimensions K={kernel_size}, M={streams}, "
            f"T={length}"
        )
    row_bytes = _bytes_per_mask(kernel_size)
    expected = streams * length * row_bytes
    payload = data[offset:]
    if len(payload) != expected:
        raise TraceFormatError(
            f"{source}: expected {expected} payload bytes, found {len(payload)}"
        )

    packed = np.frombuffer(payload, dtype=np.uint8).reshape(-1, row_bytes)
    flat = np.unpackbits(packed, axis=1, count=kernel_size, bitorder="little")
    masks = flat.astype(bool).reshape(streams, length, kernel_size)
    return SparsityTrace(layer=layer, masks=masks)


def write_csv_trace(trace: SparsityTrace, path: Path) -> None:
    """Write one ``stream,t,mask`` row per window."""
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for stream in range(trace.num_streams):
            for t, mask in enumerate(trace.stream(stream)):
                writer.writerow(
                    (stream, t, "".join("1" if bit else "0" for bit in mask))
                )


def read_csv_trace(path: Path) -> SparsityTrace:
    """Read a ``stream,t,mask`` file; rows may appear in any order.

    Raises:
        TraceFormatError: On undecodable bytes, a malformed row (with its line
            number), a duplicate or missing window, or an empty file.
    """
    try:
        rows = _read_csv_rows(path)
    except (UnicodeDecodeError, csv.Error) as e:
        raise TraceFormatError(f"{path}: not a readable CSV trace: {e}") from e

    if not rows:
        raise TraceFormatError(f"{path}: trace file has no windows")
    streams = 1 + max(stream for stream, _ in rows)
    length = 1 + max(t for _, t in rows)
    sizes = {len(mask) for mask in rows.values()}
    if len(sizes) != 1:
        raise TraceFormatError(f"{path}: masks differ in length {sorted(sizes)}")
    if len(rows) != streams * length:
        raise TraceFormatError(
            f"{path}: expected {streams * length} windows for {streams} streams "
            f"of length {length}, found {len(rows)}"
        )

    kernel_size = sizes.pop()
    masks = np.zeros((streams, length, kernel_size), dtype=bool)
    for (stream, t), mask in rows.items():
        masks[stream, t] = np.frombuffer(mask.encode("ascii"), dtype=np.uint8) == ord(
            "1"
        )
    return SparsityTrace(layer=path.stem, masks=masks)


def _read_csv_rows(path: Path) -> dict[tuple[int, int], str]:
    rows: dict[tuple[int, int], str] = {}
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError(f"{path}: empty trace file")
        if tuple(cell.strip() for cell in header) != CSV_HEADER:
            raise TraceFormatError(
                f"{path}:1: expected header {','.join(CSV_HEADER)}, got {header}"
            )
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise TraceFormatError(f"{path}:{line}: expected 3 columns")
            try:
                stream, t = int(row[0]), int(row[1])
            except ValueError as e:
                raise TraceFormatError(
                    f"{path}:{line}: stream and t must be integers"
                ) from e
            mask = row[2].strip()
            if stream < 0 or t < 0:
                raise TraceFormatError(f"{path}:{line}: negative index")
            if not mask or set(mask) - {"0", "1"}:
                raise TraceFormatError(f"{path}:{line}: mask must be a 0/1 string")
            if (stream, t) in rows:
                raise TraceFormatError(
                    f"{path}:{line}: duplicate window (stream {stream}, t {t})"
                )
            rows[(stream, t)] = mask
    return rows


def save_trace(trace: SparsityTrace, path: str | Path) -> Path:
    """Write ``trace`` in the format selected by the file suffix.

    ``.csv`` writes the text format, anything else the binary container.
    """
    file_path = Path(path)
    if file_path.suffix.lower() == CSV_SUFFIX:
        write_csv_trace(trace, file_path)
    else:
        file_path.write_bytes(encode_trace(trace))
    logger.log_event(
        logging.DEBUG,
        "trace saved",
        path=str(file_path),
        layer=trace.layer,
        streams=trace.num_streams,
        length=trace.length,
    )
    return file_path


def load_trace(path: str | Path) -> SparsityTrace:
    """Load a trace from a ``.sstr`` or ``.csv`` file.

    Raises:
        TraceFormatError: If the file is corrupt or empty.
        OSError: If the file cannot be read.
    """
    file_path = Path(path)
    if file_path.suffix.lower() == CSV_SUFFIX:
        trace = read_csv_trace(file_path)
    else:
        if file_path.suffix.lower() != TRACE_SUFFIX:
            logger.warning(f"Unknown suffix {file_path.suffix!r}, reading as binary")
        trace = decode_trace(file_path.read_bytes(), source=str(file_path))
    logger.log_event(
        logging.DEBUG,
        "trace loaded",
        path=str(file_path),
        layer=trace.layer,
        streams=trace.num_streams,
        length=trace.length,
    )
    return trace
