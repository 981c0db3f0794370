"""Reference allocators: the greedy baseline and an exact search.

The greedy allocator starts from the minimal design and keeps upgrading the
bottleneck layer. The exact search is only meant for small instances and is
the oracle the annealer is checked against.
"""

import logging
from collections.abc import Sequence

from sparsestream.analytic import ThroughputModel, buffer_lutram_cost
from sparsestream.netspec import NetworkSpec, ResourceBudget
from sparsestream.trace import SparsityStats
from sparsestream.types import InfeasibleDesignError
from sparsestream.utils.logging import setup_logging

from .design import DesignPoint, DesignSpace, LayerChoice, State

logger = setup_logging(__name__)

# Upgrade preference on equal DSP cost: k, then N_I, then N_O.
_UPGRADE_ORDER = (2, 0, 1)


def greedy_state(space: DesignSpace) -> State:
    """Greedy allocation as a raw search state.

    Repeatedly picks the layer with the largest latency and applies its
    cheapest upgrade (in DSP) that lowers that latency and still fits the
    budget. Stops when the bottleneck layer has no such upgrade.
    """
    space.check_minimal()
    state = space.minimal_state()
    base_dsp = space.dsp(state)
    while True:
        latencies = [space.latency(i, choice) for i, choice in enumerate(state)]
        bottleneck = max(range(len(state)), key=lambda i: (latencies[i], -i))
        best: tuple[int, int, State] | None = None
        for rank, variable in enumerate(_UPGRADE_ORDER):
            candidate = space.step(state, bottleneck, variable, +1)
            if candidate is None or not space.feasible(candidate):
                continue
            improved = space.latency(bottleneck, candidate[bottleneck])
            if improved >= latencies[bottleneck]:
                continue
            key = (space.dsp(candidate) - base_dsp, rank)
            if best is None or key < best[:2]:
                best = (key[0], key[1], candidate)
        if best is None:
            return state
        state = best[2]


def greedy_allocate(
    net: NetworkSpec,
    stats: Sequence[SparsityStats],
    budget: ResourceBudget,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> DesignPoint:
    """Greedy baseline design.

    Raises:
        InfeasibleDesignError: If the budget cannot hold the minimal design.
    """
    space = DesignSpace(net, stats, budget, model, dense)
    design = space.design(greedy_state(space))
    logger.log_event(
        logging.INFO,
        "greedy allocation",
        objective=design.objective,
        dsp=design.dsp_total,
    )
    return design


Option = tuple[float, int, int, LayerChoice]


def _layer_options(space: DesignSpace, index: int) -> list[Option]:
    n_i_values, n_o_values, k_values = space.ladders[index]
    options = []
    for n_i in n_i_values:
        for n_o in n_o_values:
            for k in k_values:
                choice = (n_i, n_o, k)
                options.append(
                    (
                        space.latency(index, choice),
                        n_i * n_o * k,
                        buffer_lutram_cost(0, n_i),
                        choice,
                    )
                )
    return options


def _fits(
    space: DesignSpace,
    options: list[list[Option]],
    threshold: float,
) -> State | None:
    """Cheapest-in-LUTRAM state with every latency <= threshold, if any.

    Dynamic programme over layers keyed by DSP used.
    """
    budget = space.budget
    frontier: dict[int, tuple[int, State]] = {0: (0, ())}
    for layer_options in options:
        allowed: dict[tuple[int, int], LayerChoice] = {}
        for latency, dsp, lutram, choice in layer_options:
            if latency <= threshold:
                allowed.setdefault((dsp, lutram), choice)
        following: dict[int, tuple[int, State]] = {}
        for used, (lutram_used, state) in frontier.items():
            for (dsp, lutram), choice in allowed.items():
                total_dsp = used + dsp
                total_lutram = lutram_used + lutram
                if total_dsp > budget.dsp_budget or total_lutram > budget.lutram_budget:
                    continue
                current = following.get(total_dsp)
                if current is None or total_lutram < current[0]:
                    following[total_dsp] = (total_lutram, (*state, choice))
        if not following:
            return None
        frontier = following
    return min(frontier.items())[1][1]


def exhaustive_allocate(
    net: NetworkSpec,
    stats: Sequence[SparsityStats],
    budget: ResourceBudget,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> DesignPoint:
    """Exact optimum of the network objective over every legal design.

    Binary search over the candidate bottleneck latencies; each threshold is
    checked by the dynamic programme in :func:`_fits`. Cost grows with the
    product of the channel divisor counts, the window size and the DSP
    budget, so this is for small instances only.

    Raises:
        InfeasibleDesignError: If the budget cannot hold the minimal design.
    """
    space = DesignSpace(net, stats, budget, model, dense)
    space.check_minimal()
    options = [_layer_options(space, i) for i in range(space.num_layers)]
    thresholds = sorted({option[0] for layer in options for option in layer})

    low, high = 0, len(thresholds) - 1
    best = _fits(space, options, thresholds[high])
    if best is None:
        raise InfeasibleDesignError("No design fits the budget")
    while low < high:
        middle = (low + high) // 2
        state = _fits(space, options, thresholds[middle])
        if state is None:
            low = middle + 1
        else:
            high = middle
            best = state
    design = space.design(best)
    logger.log_event(
        logging.INFO,
        "exhaustive allocation",
        objective=design.objective,
        dsp=design.dsp_total,
        thresholds=len(thresholds),
    )
    return design
