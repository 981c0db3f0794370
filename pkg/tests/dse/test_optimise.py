"""Test module for sparsestream.dse.optimise."""

import pytest

from sparsestream.analytic import network_lutram
from sparsestream.dse.anneal import AnnealSchedule, anneal
from sparsestream.dse.optimise import (
    fit_streams,
    lutram_shares,
    optimise_network,
    optimise_synthetic,
    size_design,
)
from sparsestream.netspec import NetworkSpec, ResourceBudget
from sparsestream.trace import IidBernoulli, SparsityStats, SparsityTrace
from sparsestream.types import TraceError

from ..conftest import TraceFactory

FAST = AnnealSchedule(
    initial_temperature=0.5,
    cooling_rate=0.5,
    iterations_per_temperature=10,
    min_temperature=0.01,
)
VGG16_SPARSITY = 0.65


def _network_traces(
    net: NetworkSpec, bernoulli_trace: TraceFactory, length: int = 1024
) -> list[SparsityTrace]:
    return [
        bernoulli_trace(0.5, layer.c_in, length, layer=layer, seed=index)
        for index, layer in enumerate(net.layers)
    ]


@pytest.mark.unit
class TestFitStreams:
    """Matching trace streams to the chosen N_I."""

    def test_same_count(self, bernoulli_trace: TraceFactory) -> None:
        """A trace that already fits is returned as is."""
        trace = bernoulli_trace(0.5, 4, 32)
        assert fit_streams(trace, 4) is trace

    def test_fewer_streams(self, bernoulli_trace: TraceFactory) -> None:
        """Extra streams are dropped from the end."""
        trace = bernoulli_trace(0.5, 8, 32)
        fitted = fit_streams(trace, 2)
        assert fitted.num_streams == 2
        assert fitted == trace.select_streams([0, 1])

    def test_more_streams(self, bernoulli_trace: TraceFactory) -> None:
        """Missing streams reuse the existing ones cyclically."""
        trace = bernoulli_trace(0.5, 3, 32)
        fitted = fit_streams(trace, 7)
        assert fitted == trace.select_streams([0, 1, 2, 0, 1, 2, 0])

    def test_no_streams(self, bernoulli_trace: TraceFactory) -> None:
        """Zero streams is an error."""
        with pytest.raises(TraceError):
            fit_streams(bernoulli_trace(0.5, 3, 32), 0)


@pytest.mark.unit
class TestLutramShares:
    """Splitting the LUTRAM budget."""

    @pytest.mark.parametrize(
        "lutram, n_i, expected",
        [
            (8000, [4, 8, 8], (1600, 3200, 3200)),
            (1000, [1, 1, 1], (333, 333, 333)),
            (70000, [64], (70000,)),
        ],
    )
    def test_proportional(
        self, lutram: int, n_i: list[int], expected: tuple[int, ...]
    ) -> None:
        """Shares follow N_I and never exceed the budget in total."""
        budget = ResourceBudget(dsp_budget=1, lutram_budget=lutram)
        shares = lutram_shares(budget, n_i)
        assert shares == expected
        assert sum(shares) <= lutram


@pytest.mark.integration
class TestOptimise:
    """Allocation followed by buffer sizing."""

    def test_optimise_network(
        self,
        toy_net: NetworkSpec,
        toy_budget: ResourceBudget,
        bernoulli_trace: TraceFactory,
    ) -> None:
        """Depths come from the sizing and the design stays in budget."""
        traces = _network_traces(toy_net, bernoulli_trace)
        result = optimise_network(toy_net, traces, toy_budget, FAST)
        design = result.design
        assert design.feasible
        assert design.lutram_total == network_lutram(design.configs)
        assert design.lutram_total <= toy_budget.lutram_budget
        for config, sizing, trace, share in zip(
            design.configs,
            result.sizings,
            result.traces,
            result.lutram_shares,
            strict=True,
        ):
            assert sizing is not None
            assert config.buffer_depth == sizing.depth
            assert trace.num_streams == config.n_i
            assert trace.length == 1024
            assert share > 0
        assert design.objective == result.anneal.design.objective

    def test_trace_count_checked(
        self,
        toy_net: NetworkSpec,
        toy_budget: ResourceBudget,
        bernoulli_trace: TraceFactory,
    ) -> None:
        """One trace per layer is required."""
        traces = _network_traces(toy_net, bernoulli_trace)[:2]
        with pytest.raises(TraceError):
            optimise_network(toy_net, traces, toy_budget, FAST)

    def test_size_design_trace_count(
        self,
        toy_net: NetworkSpec,
        toy_budget: ResourceBudget,
        bernoulli_trace: TraceFactory,
    ) -> None:
        """size_design checks the trace count against the design."""
        stats = [SparsityStats.uniform(0.5) for _ in toy_net.layers]
        result = anneal(toy_net, stats, toy_budget, FAST)
        traces = _network_traces(toy_net, bernoulli_trace)
        with pytest.raises(TraceError):
            size_design(result, traces[:1], toy_budget)

    def test_dense_keeps_handshakes(
        self,
        toy_net: NetworkSpec,
        toy_budget: ResourceBudget,
        bernoulli_trace: TraceFactory,
    ) -> None:
        """Dense designs are not sized and keep depth 0."""
        traces = _network_traces(toy_net, bernoulli_trace)
        result = optimise_network(toy_net, traces, toy_budget, FAST, dense=True)
        assert result.sizings == (None, None, None)
        assert all(config.buffer_depth == 0 for config in result.design.configs)

    def test_optimise_synthetic(
        self, toy_net: NetworkSpec, toy_budget: ResourceBudget
    ) -> None:
        """Traces are generated with one stream per chosen N_I."""
        result = optimise_synthetic(
            toy_net, IidBernoulli(0.5), toy_budget, length=512, schedule=FAST
        )
        assert [t.num_streams for t in result.traces] == [
            c.n_i for c in result.design.configs
        ]
        assert all(t.length == 512 for t in result.traces)
        assert [t.layer for t in result.traces] == ["conv1", "conv2", "conv3"]

    def test_optimise_synthetic_deterministic(
        self, toy_net: NetworkSpec, toy_budget: ResourceBudget
    ) -> None:
        """The schedule's seed fixes both the allocation and the traces."""
        runs = [
            optimise_synthetic(
                toy_net,
                IidBernoulli(0.5),
                toy_budget,
                length=256,
                schedule=FAST.with_seed(5),
            )
            for _ in range(2)
        ]
        assert runs[0].design == runs[1].design
        assert runs[0].traces == runs[1].traces


@pytest.mark.validation
@pytest.mark.slow
class TestDenseVersusSparse:
    """Zero skipping against the dense baseline on VGG16."""

    def test_speedup_range(self, vgg: NetworkSpec) -> None:
        """Equal DSP budgets give a speedup between 1.3x and 1/(1 - 0.65)."""
        budget = ResourceBudget(dsp_budget=512, lutram_budget=40000)
        stats = [SparsityStats.uniform(VGG16_SPARSITY) for _ in vgg.layers]
        schedule = AnnealSchedule(seed=0)
        sparse = anneal(vgg, stats, budget, schedule).design
        dense = anneal(vgg, stats, budget, schedule, dense=True).design
        speedup = sparse.objective / dense.objective
        assert 1.3 <= speedup <= 1 / (1 - VGG16_SPARSITY)
