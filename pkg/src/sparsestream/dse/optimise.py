"""End-to-end design flow: MAC allocation, then buffer sizing per layer."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from sparsestream.analytic import ThroughputModel, buffer_lutram_cost
from sparsestream.const import DEFAULT_EPSILON, DEFAULT_W_MAX
from sparsestream.netspec import NetworkSpec, ResourceBudget
from sparsestream.trace import (
    SparsityModel,
    SparsityStats,
    SparsityTrace,
    compute_stats,
    generate_network_traces,
)
from sparsestream.types import TraceError
from sparsestream.utils.logging import setup_logging

from .anneal import AnnealResult, AnnealSchedule, anneal
from .buffers import BufferSizing, size_buffers
from .design import DesignPoint

logger = setup_logging(__name__)


@dataclass(frozen=True)
class OptimisationResult:
    """Outcome of :func:`optimise_network`.

    Attributes:
        design: Final design with buffer depths filled in.
        anneal: The annealing run that produced the MAC allocation.
        sizings: Buffer sizing outcome per layer (None in dense mode).
        lutram_shares: LUTRAM cap handed to each layer.
        traces: Per-layer traces with one stream per engine row.
    """

    design: DesignPoint
    anneal: AnnealResult
    sizings: tuple[BufferSizing | None, ...]
    lutram_shares: tuple[int, ...]
    traces: tuple[SparsityTrace, ...]


def fit_streams(trace: SparsityTrace, streams: int) -> SparsityTrace:
    """Trace with exactly ``streams`` streams, reusing streams cyclically."""
    if streams < 1:
        raise TraceError(f"Need at least one stream, got {streams}")
    if trace.num_streams == streams:
        return trace
    if trace.num_streams < streams:
        logger.warning(
            f"Trace of {trace.layer} has {trace.num_streams} streams for "
            f"N_I={streams}; streams are reused"
        )
    return trace.select_streams([m % trace.num_streams for m in range(streams)])


def lutram_shares(budget: ResourceBudget, n_i: Sequence[int]) -> tuple[int, ...]:
    """Split the LUTRAM budget across layers in proportion to N_I."""
    total = sum(n_i)
    return tuple(budget.lutram_budget * streams // total for streams in n_i)


def size_design(
    result: AnnealResult,
    traces: Sequence[SparsityTrace],
    budget: ResourceBudget,
    epsilon: float = DEFAULT_EPSILON,
    w_max: int = DEFAULT_W_MAX,
    dense: bool = False,
) -> OptimisationResult:
    """Size the buffers of an annealed allocation.

    Each layer's trace is fitted to the chosen N_I and the LUTRAM budget is
    split across layers in proportion to N_I. Dense engines have no
    sparsity-driven imbalance and keep depth 0.
    """
    allocation = result.design
    if len(traces) != len(allocation.configs):
        raise TraceError(
            f"Need one trace per layer, got {len(traces)} "
            f"for {len(allocation.configs)}"
        )
    n_i = [config.n_i for config in allocation.configs]
    shares = lutram_shares(budget, n_i)
    fitted = tuple(
        fit_streams(trace, streams) for trace, streams in zip(traces, n_i, strict=True)
    )
    sizings: tuple[BufferSizing | None, ...]
    if dense:
        sizings = tuple(None for _ in fitted)
        depths = [0 for _ in fitted]
    else:
        sized = tuple(
            size_buffers(trace, share, epsilon, w_max)
            for trace, share in zip(fitted, shares, strict=True)
        )
        sizings = sized
        depths = [sizing.depth for sizing in sized]

    design = allocation.with_depths(depths, budget)
    logger.log_event(
        logging.INFO,
        "design optimised",
        objective=design.objective,
        dsp=design.dsp_total,
        lutram=design.lutram_total,
        depths=depths,
        handshake_lutram=sum(buffer_lutram_cost(0, streams) for streams in n_i),
    )
    return OptimisationResult(
        design=design,
        anneal=result,
        sizings=sizings,
        lutram_shares=shares,
        traces=fitted,
    )


def optimise_network(
    net: NetworkSpec,
    traces: Sequence[SparsityTrace],
    budget: ResourceBudget,
    schedule: AnnealSchedule | None = None,
    epsilon: float = DEFAULT_EPSILON,
    w_max: int = DEFAULT_W_MAX,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> OptimisationResult:
    """Allocate MACs by annealing on trace statistics, then size the buffers.

    Raises:
        InfeasibleDesignError: If the budget cannot hold the minimal design.
        TraceError: If the number of traces differs from the number of layers.
    """
    if len(traces) != len(net):
        raise TraceError(f"Need one trace per layer, got {len(traces)} for {len(net)}")
    stats = [compute_stats(trace) for trace in traces]
    result = anneal(net, stats, budget, schedule, model, dense)
    return size_design(result, traces, budget, epsilon, w_max, dense)


def optimise_synthetic(
    net: NetworkSpec,
    sparsity: SparsityModel,
    budget: ResourceBudget,
    length: int,
    schedule: AnnealSchedule | None = None,
    epsilon: float = DEFAULT_EPSILON,
    w_max: int = DEFAULT_W_MAX,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> OptimisationResult:
    """Like :func:`optimise_network` for a synthetic sparsity model.

    The allocation uses the model's mean sparsity for every layer. Traces
    of ``length`` windows with one stream per chosen N_I are generated
    afterwards, seeded from the schedule's seed.
    """
    schedule = schedule or AnnealSchedule()
    stats = [SparsityStats.uniform(sparsity.mean_sparsity) for _ in net.layers]
    result = anneal(net, stats, budget, schedule, model, dense)
    streams = [config.n_i for config in result.design.configs]
    traces = generate_network_traces(
        net.layers, streams, length, sparsity, schedule.seed
    )
    return size_design(result, traces, budget, epsilon, w_max, dense)
