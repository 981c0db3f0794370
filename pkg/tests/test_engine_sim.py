"""Test module for sparsestream.engine_sim."""

import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsestream.engine_sim import (
    SWEEP_COLUMNS,
    EngineConfig,
    cycles_from_counts,
    dense_ops_per_cycle,
    expected_ops_per_cycle_oracle,
    min_macs_for_peak,
    run_engine,
    sparsity_grid,
    sweep_engine,
    window_cycles,
    write_sweep_csv,
)
from sparsestream.trace import WindowPattern
from sparsestream.types import ConfigError

from .config import COMPARISON, ORACLE

SWEEP_LENGTH = 100_000

# (k, p_zero, plotted OPs/cycle of a 3x3 engine)
FIGURE_ANCHORS = [
    (1, 0.5, 2.0004),
    (2, 0.5, 3.586),
    (4, 0.3, 4.639),
    (1, 0.75, 3.831),
]


def _iid_masks(p_zero: float, length: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.random((length, 9)) >= p_zero


@pytest.mark.unit
class TestEngineConfig:
    """Engine validation."""

    @pytest.mark.parametrize("k", [0, 10, -1])
    def test_k_range(self, k: int) -> None:
        """k must lie in [1, K]."""
        with pytest.raises(ConfigError):
            EngineConfig(3, 3, k)

    def test_non_integer(self) -> None:
        """Dimensions must be integers."""
        with pytest.raises(ConfigError):
            EngineConfig(3, 3, 1.5)  # type: ignore[arg-type]

    def test_kernel_size(self) -> None:
        """K = K_x * K_y."""
        assert EngineConfig(5, 3, 2).kernel_size == 15


@pytest.mark.unit
class TestWindowCycles:
    """Cycles per window."""

    @pytest.mark.parametrize(
        "bits,k,expected",
        [
            ("101000111", 1, 5),
            ("101000111", 2, 3),
            ("101000111", 5, 1),
            ("101000111", 9, 1),
            ("000000000", 1, 1),
            ("111111111", 4, 3),
        ],
    )
    def test_sparse(self, bits: str, k: int, expected: int) -> None:
        """max(1, ceil(nnz / k))."""
        pattern = WindowPattern.from_bits(bits)
        assert window_cycles(pattern, EngineConfig(3, 3, k)) == expected

    @pytest.mark.parametrize("k,expected", [(1, 9), (2, 5), (4, 3), (9, 1)])
    def test_dense(self, k: int, expected: int) -> None:
        """Dense engines take ceil(K / k) whatever the pattern."""
        pattern = WindowPattern.from_bits("000000000")
        assert window_cycles(pattern, EngineConfig(3, 3, k, True)) == expected

    def test_size_mismatch(self) -> None:
        """Pattern and engine window sizes must agree."""
        with pytest.raises(ConfigError):
            window_cycles(WindowPattern.from_bits("1111"), EngineConfig(3, 3, 1))

    def test_vectorised(self) -> None:
        """cycles_from_counts agrees with window_cycles."""
        config = EngineConfig(3, 3, 2)
        counts = np.arange(10)
        expected = [max(1, math.ceil(n / 2)) for n in range(10)]
        assert cycles_from_counts(counts, config).tolist() == expected


@pytest.mark.unit
class TestRunEngine:
    """Whole-stream runs."""

    def test_report(self) -> None:
        """Totals, OPs/cycle and histogram of a short stream."""
        stream = [
            WindowPattern.from_bits("101000111"),
            WindowPattern.from_bits("000000000"),
            WindowPattern.from_bits("111111111"),
        ]
        report = run_engine(stream, EngineConfig(3, 3, 2))
        assert report.windows_processed == 3
        assert report.total_cycles == 3 + 1 + 5
        assert report.equivalent_ops_per_cycle == pytest.approx(27 / 9)
        assert report.cycles_histogram == {1: 1, 3: 1, 5: 1}
        assert report.mean_window_cycles == pytest.approx(3.0)

    def test_array_input(self) -> None:
        """A (T, K) mask array gives the same report as patterns."""
        masks = _iid_masks(0.5, 200, seed=5)
        patterns = [WindowPattern.from_array(row) for row in masks]
        config = EngineConfig(3, 3, 3)
        assert run_engine(masks, config) == run_engine(patterns, config)

    def test_empty_stream(self) -> None:
        """Empty streams are rejected."""
        with pytest.raises(ConfigError):
            run_engine([], EngineConfig(3, 3, 1))

    def test_wrong_shape(self) -> None:
        """Mask arrays must be (T, K)."""
        with pytest.raises(ConfigError):
            run_engine(np.ones((4, 4), dtype=bool), EngineConfig(3, 3, 1))

    def test_full_parallel_is_exact(self) -> None:
        """k = K makes every window a single cycle."""
        report = run_engine(_iid_masks(0.4, 1000, seed=1), EngineConfig(3, 3, 9))
        assert report.equivalent_ops_per_cycle == 9.0

    @settings(max_examples=60, deadline=None)
    @given(
        length=st.integers(1, 60),
        p_zero=st.floats(0.0, 1.0),
        seed=st.integers(0, 2**16),
    )
    def test_monotone_in_k(self, length: int, p_zero: float, seed: int) -> None:
        """More MACs never cost cycles; sparse never loses to dense."""
        masks = _iid_masks(p_zero, length, seed)
        totals = []
        for k in range(1, 10):
            sparse = run_engine(masks, EngineConfig(3, 3, k)).total_cycles
            dense = run_engine(masks, EngineConfig(3, 3, k, True)).total_cycles
            assert sparse <= dense
            totals.append(sparse)
        assert totals == sorted(totals, reverse=True)

    def test_dense_stream_equality(self) -> None:
        """Fully dense windows cost the same in both modes."""
        masks = np.ones((50, 9), dtype=bool)
        for k in range(1, 10):
            sparse = run_engine(masks, EngineConfig(3, 3, k))
            dense = run_engine(masks, EngineConfig(3, 3, k, True))
            assert sparse.total_cycles == dense.total_cycles


@pytest.mark.unit
class TestOracle:
    """Exact binomial expectation."""

    @pytest.mark.parametrize(
        "k,p_zero,expected",
        [
            (1, 0.5, ORACLE.k1_half),
            (2, 0.5, ORACLE.k2_half),
            (4, 0.3, ORACLE.k4_p03),
            (1, 0.75, ORACLE.k1_three_quarters),
        ],
    )
    def test_values(self, k: int, p_zero: float, expected: float) -> None:
        """Closed-form reference values."""
        value = expected_ops_per_cycle_oracle(3, 3, k, p_zero)
        assert value == pytest.approx(expected, abs=ORACLE.tolerance)

    def test_k1_half_exact(self) -> None:
        """E[max(1, N)] = E[N] + P(N = 0)."""
        value = expected_ops_per_cycle_oracle(3, 3, 1, 0.5)
        assert value == pytest.approx(9 / (4.5 + 2**-9))

    @pytest.mark.parametrize("p_zero", [0.0, 0.3, 1.0])
    def test_full_parallel(self, p_zero: float) -> None:
        """k = K gives K."""
        assert expected_ops_per_cycle_oracle(3, 3, 9, p_zero) == pytest.approx(9.0)

    def test_all_zero(self) -> None:
        """Empty windows still take one cycle."""
        assert expected_ops_per_cycle_oracle(3, 3, 1, 1.0) == pytest.approx(9.0)

    def test_invalid_probability(self) -> None:
        """p_zero must be a probability."""
        with pytest.raises(ConfigError):
            expected_ops_per_cycle_oracle(3, 3, 1, 1.5)

    def test_dense_baseline(self) -> None:
        """K / ceil(K / k)."""
        assert [dense_ops_per_cycle(3, 3, k) for k in (1, 2, 4, 9)] == [
            1.0,
            1.8,
            3.0,
            9.0,
        ]

    @pytest.mark.parametrize("p_zero", [0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
    def test_fewer_macs_reach_peak(self, p_zero: float) -> None:
        """With 40% or more zeros, fewer than K MACs reach 99% of K."""
        assert min_macs_for_peak(3, 3, p_zero) < 9

    def test_dense_needs_all_macs(self) -> None:
        """Without zeros every MAC is needed."""
        assert min_macs_for_peak(3, 3, 0.0) == 9


@pytest.mark.validation
class TestFigureReproduction:
    """Simulated OPs/cycle against plotted reference values."""

    @pytest.mark.parametrize("k,p_zero,plotted", FIGURE_ANCHORS)
    def test_anchor_points(self, k: int, p_zero: float, plotted: float) -> None:
        """Within 3% of the plotted curve at T = 1e5."""
        masks = _iid_masks(p_zero, SWEEP_LENGTH, seed=11)
        report = run_engine(masks, EngineConfig(3, 3, k))
        assert report.equivalent_ops_per_cycle == pytest.approx(plotted, rel=0.03)

    def test_plateau(self) -> None:
        """The k = 9 curve is flat at 9."""
        for p_zero in (0.0, 0.25, 0.5, 0.75):
            masks = _iid_masks(p_zero, 1000, seed=2)
            report = run_engine(masks, EngineConfig(3, 3, 9))
            assert report.equivalent_ops_per_cycle == 9.0

    @pytest.mark.slow
    def test_oracle_equivalence(self) -> None:
        """Monte-Carlo agrees with the oracle within 3 sigma over the full grid.

        With 189 grid points a handful of 3-sigma excursions are expected by
        chance, so at most 2% may fall outside 3 sigma and none outside 5.
        """
        outside = []
        grid = sparsity_grid()
        for index, p_zero in enumerate(grid):
            masks = _iid_masks(p_zero, SWEEP_LENGTH, seed=100 + index)
            for k in range(1, 10):
                report = run_engine(masks, EngineConfig(3, 3, k))
                oracle = expected_ops_per_cycle_oracle(3, 3, k, p_zero)
                error = abs(report.equivalent_ops_per_cycle - oracle)
                sigma = report.ops_per_cycle_stderr(9)
                assert error <= 5 * sigma + COMPARISON.float_tolerance
                if error > 3 * sigma + COMPARISON.float_tolerance:
                    outside.append((k, p_zero))
        assert len(outside) <= 0.02 * 9 * len(grid), outside


@pytest.mark.unit
class TestSweep:
    """OPs/cycle sweep and its CSV."""

    def test_grid(self) -> None:
        """21 sparsities from 0 to 1."""
        grid = sparsity_grid()
        assert len(grid) == 21
        assert grid[0] == 0.0
        assert grid[-1] == 1.0
        assert grid[13] == 0.65

    def test_invalid_step(self) -> None:
        """Steps outside (0, 1] are rejected."""
        with pytest.raises(ConfigError):
            sparsity_grid(0.0)

    def test_rows(self, tmp_path: Path) -> None:
        """One row per (sparsity, k), ordered by sparsity then k."""
        rows = sweep_engine(3, 3, range(1, 10), sparsity_grid(), length=200, seed=4)
        assert len(rows) == 189
        assert [row.k for row in rows[:9]] == list(range(1, 10))
        assert rows[9].sparsity == 0.05
        path = write_sweep_csv(rows, tmp_path / "sweep.csv")
        with path.open() as f:
            lines = list(csv.reader(f))
        assert tuple(lines[0]) == SWEEP_COLUMNS
        assert len(lines) == 190

    def test_deterministic(self) -> None:
        """Same seed, same rows."""
        first = sweep_engine(3, 3, [1, 2], [0.3, 0.6], length=500, seed=9)
        second = sweep_engine(3, 3, [2, 1], [0.3, 0.6], length=500, seed=9)
        assert first == second

    def test_invalid_k(self) -> None:
        """k outside [1, K] is rejected."""
        with pytest.raises(ConfigError):
            sweep_engine(3, 3, [10], [0.5], length=10)

    @pytest.mark.parametrize("k,p_zero,plotted", FIGURE_ANCHORS)
    def test_spot_rows(self, k: int, p_zero: float, plotted: float) -> None:
        """Sweep rows reproduce the plotted curve within 0.1."""
        (row,) = sweep_engine(3, 3, [k], [p_zero], length=SWEEP_LENGTH, seed=3)
        assert row.ops_per_cycle_sim == pytest.approx(plotted, abs=0.1)
