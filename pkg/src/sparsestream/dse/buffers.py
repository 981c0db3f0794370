"""Buffer-depth sizing from the back-pressure metric.

Depths are swept by doubling from 2. The first depth w where doubling
again buys little, ``(rho_w - rho_2w) / max(rho_2, 1e-6) < epsilon``, is
taken and then clipped to what the LUTRAM cap allows.
"""

import logging
from dataclasses import dataclass, field

from sparsestream.analytic import buffer_lutram_cost
from sparsestream.const import (
    DEFAULT_EPSILON,
    DEFAULT_W_MAX,
    LUTRAM_DEPTH_STEP,
    MIN_BUFFER_DEPTH,
    RHO_GUARD,
)
from sparsestream.trace import SparsityTrace, rho_sweep
from sparsestream.types import BufferDepth, ConfigError
from sparsestream.utils.logging import setup_logging

logger = setup_logging(__name__)


@dataclass(frozen=True)
class BufferSizing:
    """Chosen depth and how it was reached.

    Attributes:
        depth: Buffer depth per stream; 0 when even depth 2 does not fit.
        rho: rho_w for every depth evaluated.
        w_max: Largest depth actually considered.
        w_max_reduced: The trace was too short for the requested w_max.
        cap_exceeded: The LUTRAM cap is below the cost of depth 2.
        clipped: The depth was lowered to fit the LUTRAM cap.
    """

    depth: BufferDepth
    rho: dict[int, float] = field(default_factory=dict)
    w_max: int = DEFAULT_W_MAX
    w_max_reduced: bool = False
    cap_exceeded: bool = False
    clipped: bool = False


def doubling_depths(w_max: int) -> list[int]:
    """Depths 2, 4, 8, ... up to and including ``w_max``."""
    depths = []
    w = MIN_BUFFER_DEPTH
    while w <= w_max:
        depths.append(w)
        w *= 2
    return depths


def largest_affordable_depth(lutram_cap: int, streams: int) -> int:
    """Largest depth whose buffers for ``streams`` streams fit ``lutram_cap``.

    Returns -1 when not even the bare handshake fits.
    """
    if streams < 1:
        raise ConfigError(f"Need at least one stream, got {streams}")
    base = buffer_lutram_cost(0, streams)
    if base > lutram_cap:
        return -1
    # Cost is a staircase in ceil(w / 32) with equal steps.
    step = buffer_lutram_cost(LUTRAM_DEPTH_STEP, streams) - base
    return (lutram_cap - base) // step * LUTRAM_DEPTH_STEP


def size_buffers(
    trace: SparsityTrace,
    lutram_cap: int,
    epsilon: float = DEFAULT_EPSILON,
    w_max: int = DEFAULT_W_MAX,
) -> BufferSizing:
    """Choose the buffer depth of one layer from its trace.

    Raises:
        ConfigError: If ``epsilon`` <= 0 or ``w_max`` < 2.
    """
    if not epsilon > 0.0:
        raise ConfigError(f"epsilon must be > 0, got {epsilon}")
    if w_max < MIN_BUFFER_DEPTH:
        raise ConfigError(f"w_max must be >= {MIN_BUFFER_DEPTH}, got {w_max}")

    streams = trace.num_streams
    if buffer_lutram_cost(MIN_BUFFER_DEPTH, streams) > lutram_cap:
        logger.log_event(
            logging.WARNING,
            "buffer cap below minimum depth",
            layer=trace.layer,
            lutram_cap=lutram_cap,
            required=buffer_lutram_cost(MIN_BUFFER_DEPTH, streams),
        )
        return BufferSizing(depth=0, w_max=w_max, cap_exceeded=True)

    # rho_2w must exist for every candidate w.
    usable = w_max
    while usable > MIN_BUFFER_DEPTH and 2 * usable > trace.length:
        usable //= 2
    reduced = usable < w_max
    if reduced:
        logger.warning(
            f"Trace of {trace.layer} has {trace.length} windows; "
            f"w_max reduced from {w_max} to {usable}"
        )

    rho: dict[int, float] = {}
    chosen = MIN_BUFFER_DEPTH
    if streams > 1 and 2 * MIN_BUFFER_DEPTH <= trace.length:
        depths = doubling_depths(usable)
        wanted = sorted({d for w in depths for d in (w, 2 * w)})
        rho = rho_sweep(trace, [d for d in wanted if d <= trace.length])
        scale = max(rho[MIN_BUFFER_DEPTH], RHO_GUARD)
        chosen = depths[-1]
        for w in depths:
            if (rho[w] - rho[2 * w]) / scale < epsilon:
                chosen = w
                break

    affordable = largest_affordable_depth(lutram_cap, streams)
    depth = min(chosen, affordable)
    sizing = BufferSizing(
        depth=depth,
        rho=rho,
        w_max=usable,
        w_max_reduced=reduced,
        clipped=depth < chosen,
    )
    logger.log_event(
        logging.INFO,
        "buffer depth chosen",
        layer=trace.layer,
        depth=depth,
        unclipped=chosen,
        lutram=buffer_lutram_cost(depth, streams),
        lutram_cap=lutram_cap,
    )
    return sizing
