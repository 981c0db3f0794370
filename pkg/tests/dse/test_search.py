"""Test module for sparsestream.dse.search."""

import itertools

import pytest

from sparsestream.dse.design import DesignSpace
from sparsestream.dse.search import exhaustive_allocate, greedy_allocate, greedy_state
from sparsestream.netspec import LayerSpec, NetworkSpec, ResourceBudget
from sparsestream.trace import SparsityStats
from sparsestream.types import InfeasibleDesignError

# Small enough to enumerate every state directly
PAIR = NetworkSpec(
    layers=(
        LayerSpec("a", 2, 4, 6, 6, 3, 3),
        LayerSpec("b", 4, 2, 6, 6, 3, 3),
    )
)


def _stats(net: NetworkSpec, *means: float) -> list[SparsityStats]:
    if not means:
        means = (0.5,) * len(net)
    return [SparsityStats.uniform(mean) for mean in means]


def _brute_force(space: DesignSpace) -> float:
    per_layer = [
        list(itertools.product(*ladders)) for ladders in space.ladders
    ]
    return max(
        space.objective(state)
        for state in itertools.product(*per_layer)
        if space.feasible(state)
    )


@pytest.mark.unit
class TestGreedy:
    """Greedy baseline allocation."""

    def test_feasible_and_better_than_minimal(
        self, toy_net: NetworkSpec, toy_budget: ResourceBudget
    ) -> None:
        """Greedy fits the budget and improves on the minimal design."""
        stats = _stats(toy_net)
        space = DesignSpace(toy_net, stats, toy_budget)
        design = greedy_allocate(toy_net, stats, toy_budget)
        assert design.feasible
        assert design.dsp_total <= toy_budget.dsp_budget
        assert design.objective > space.objective(space.minimal_state())

    def test_deterministic(
        self, toy_net: NetworkSpec, toy_budget: ResourceBudget
    ) -> None:
        """Greedy has no randomness."""
        stats = _stats(toy_net)
        first = greedy_state(DesignSpace(toy_net, stats, toy_budget))
        second = greedy_state(DesignSpace(toy_net, stats, toy_budget))
        assert first == second

    def test_tight_budget_stays_minimal(self, toy_net: NetworkSpec) -> None:
        """With exactly three DSPs nothing can be upgraded."""
        budget = ResourceBudget(dsp_budget=3, lutram_budget=8000)
        design = greedy_allocate(toy_net, _stats(toy_net), budget)
        assert [(c.n_i, c.n_o, c.k) for c in design.configs] == [(1, 1, 1)] * 3

    def test_infeasible(self, toy_net: NetworkSpec) -> None:
        """A budget below the minimal design raises."""
        budget = ResourceBudget(dsp_budget=0, lutram_budget=8000)
        with pytest.raises(InfeasibleDesignError):
            greedy_allocate(toy_net, _stats(toy_net), budget)


@pytest.mark.unit
class TestExhaustive:
    """Exact search against direct enumeration."""

    @pytest.mark.parametrize(
        "dsp_budget, lutram_budget, means",
        [
            (2, 1000, (0.5, 0.5)),
            (8, 1000, (0.5, 0.5)),
            (24, 1000, (0.8, 0.2)),
            (64, 1000, (0.0, 0.9)),
            (64, 27, (0.5, 0.5)),
        ],
    )
    def test_matches_enumeration(
        self, dsp_budget: int, lutram_budget: int, means: tuple[float, ...]
    ) -> None:
        """The exact search reaches the enumerated optimum."""
        budget = ResourceBudget(dsp_budget=dsp_budget, lutram_budget=lutram_budget)
        stats = _stats(PAIR, *means)
        design = exhaustive_allocate(PAIR, stats, budget)
        optimum = _brute_force(DesignSpace(PAIR, stats, budget))
        assert design.feasible
        assert design.objective == pytest.approx(optimum)

    def test_not_worse_than_greedy(
        self, toy_net: NetworkSpec, toy_budget: ResourceBudget
    ) -> None:
        """The optimum bounds the greedy design from above."""
        stats = _stats(toy_net, 0.3, 0.6, 0.8)
        greedy = greedy_allocate(toy_net, stats, toy_budget)
        best = exhaustive_allocate(toy_net, stats, toy_budget)
        assert best.feasible
        assert best.objective >= greedy.objective * (1 - 1e-12)

    def test_skewed_sparsity_shifts_macs(self) -> None:
        """The denser layer gets more MACs when sparsity is uneven."""
        budget = ResourceBudget(dsp_budget=24, lutram_budget=1000)
        design = exhaustive_allocate(PAIR, _stats(PAIR, 0.8, 0.2), budget)
        sparse, dense = design.configs
        assert dense.n_i * dense.n_o * dense.k > sparse.n_i * sparse.n_o * sparse.k

    def test_infeasible(self, toy_net: NetworkSpec) -> None:
        """A budget below the minimal design raises."""
        budget = ResourceBudget(dsp_budget=64, lutram_budget=10)
        with pytest.raises(InfeasibleDesignError):
            exhaustive_allocate(toy_net, _stats(toy_net), budget)
