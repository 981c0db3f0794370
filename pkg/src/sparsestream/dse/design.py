"""Design points, the search space they live in, and their export formats."""

import csv
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Final, NamedTuple

from sparsestream.analytic import (
    LayerConfig,
    ThroughputEstimate,
    ThroughputModel,
    buffer_lutram_cost,
    divisors,
    dsp_usage,
    layer_estimate,
    lutram_usage,
    stream_means,
)
from sparsestream.netspec import NetworkSpec, ResourceBudget
from sparsestream.trace import SparsityStats
from sparsestream.types import ConfigError, DesignFormatError, InfeasibleDesignError

CONVERGENCE_COLUMNS: Final[tuple[str, ...]] = (
    "iteration",
    "temperature",
    "objective",
    "accepted",
)

# Per-layer search state: (N_I, N_O, k)
LayerChoice = tuple[int, int, int]
State = tuple[LayerChoice, ...]


@dataclass(frozen=True)
class DesignPoint:
    """One accelerator design and its predicted performance.

    Attributes:
        configs: Per-layer configuration, in network order.
        objective: Predicted network throughput in images per cycle.
        dsp_total: DSPs used by all layers.
        lutram_total: Buffer LUTRAM used by all layers.
        feasible: Whether the design fits the budget and folds every layer.
        layers: Layer names, in network order.
        latencies: Predicted cycles per image of every layer.
        thetas: Throughput of the slowest engine of every layer.
    """

    configs: tuple[LayerConfig, ...]
    objective: float
    dsp_total: int
    lutram_total: int
    feasible: bool
    layers: tuple[str, ...] = ()
    latencies: tuple[float, ...] = ()
    thetas: tuple[float, ...] = ()

    def with_depths(
        self, depths: Sequence[int], budget: ResourceBudget
    ) -> "DesignPoint":
        """Copy with new buffer depths; LUTRAM and feasibility are recomputed."""
        if len(depths) != len(self.configs):
            raise ConfigError(
                f"Need one depth per layer, got {len(depths)} for {len(self.configs)}"
            )
        configs = tuple(
            config.with_depth(depth)
            for config, depth in zip(self.configs, depths, strict=True)
        )
        lutram = sum(lutram_usage(config) for config in configs)
        return DesignPoint(
            configs=configs,
            objective=self.objective,
            dsp_total=self.dsp_total,
            lutram_total=lutram,
            feasible=self.feasible
            and self.dsp_total <= budget.dsp_budget
            and lutram <= budget.lutram_budget,
            layers=self.layers,
            latencies=self.latencies,
            thetas=self.thetas,
        )


class DesignSpace:
    """Legal per-layer choices and cached model evaluation for one problem.

    N_I and N_O range over the divisors of C_I and C_O, k over 1..K. Resource
    use is counted with bare handshakes (depth 0); buffers are sized later.
    """

    def __init__(
        self,
        net: NetworkSpec,
        stats: Sequence[SparsityStats],
        budget: ResourceBudget,
        model: ThroughputModel = ThroughputModel.EQ2,
        dense: bool = False,
    ) -> None:
        """Set up the ladders of legal values for every layer."""
        if len(stats) != len(net):
            raise ConfigError(
                f"Need one stats entry per layer, got {len(stats)} for {len(net)}"
            )
        self.net = net
        self.stats = tuple(stats)
        self.budget = budget
        self.model = model
        self.dense = dense
        self.ladders: tuple[tuple[tuple[int, ...], ...], ...] = tuple(
            (
                divisors(layer.c_in),
                divisors(layer.c_out),
                tuple(range(1, layer.kernel_size + 1)),
            )
            for layer in net.layers
        )
        self._latency: dict[tuple[int, LayerChoice], float] = {}

    @property
    def num_layers(self) -> int:
        """Number of layers (L)."""
        return len(self.net)

    def minimal_state(self) -> State:
        """Every layer at N_I = N_O = k = 1."""
        return tuple((1, 1, 1) for _ in range(self.num_layers))

    def check_minimal(self) -> None:
        """Raise when not even the minimal design fits the budget.

        Raises:
            InfeasibleDesignError: With the shortfall in DSP or LUTRAM.
        """
        state = self.minimal_state()
        if not self.feasible(state):
            raise InfeasibleDesignError(
                f"Budget (dsp={self.budget.dsp_budget}, "
                f"lutram={self.budget.lutram_budget}) cannot hold the minimal "
                f"design (dsp={self.dsp(state)}, lutram={self.lutram(state)})"
            )

    def config(self, choice: LayerChoice, depth: int = 0) -> LayerConfig:
        """LayerConfig for one layer's choice."""
        return LayerConfig(choice[0], choice[1], choice[2], depth)

    def latency(self, index: int, choice: LayerChoice) -> float:
        """Predicted cycles per image of layer ``index`` under ``choice``."""
        key = (index, choice)
        cached = self._latency.get(key)
        if cached is None:
            estimate = self.estimate(index, choice)
            cached = estimate.layer_latency_cycles
            self._latency[key] = cached
        return cached

    def estimate(self, index: int, choice: LayerChoice) -> ThroughputEstimate:
        """Full ThroughputEstimate of layer ``index`` under ``choice``."""
        layer = self.net.layers[index]
        config = self.config(choice)
        return layer_estimate(
            layer,
            config,
            stream_means(self.stats[index], config),
            batch_size=self.net.batch_size,
            model=self.model,
            dense=self.dense,
        )

    def objective(self, state: State) -> float:
        """Network throughput in images per cycle."""
        slowest = max(self.latency(i, choice) for i, choice in enumerate(state))
        return self.net.batch_size / slowest

    def energy(self, state: State) -> float:
        """Annealing energy, lower is better."""
        return -math.log(self.objective(state))

    def dsp(self, state: State) -> int:
        """DSPs used by ``state``."""
        return sum(dsp_usage(self.config(choice)) for choice in state)

    def lutram(self, state: State) -> int:
        """Handshake LUTRAM used by ``state``."""
        return sum(buffer_lutram_cost(0, choice[0]) for choice in state)

    def feasible(self, state: State) -> bool:
        """Whether ``state`` fits both budgets."""
        return (
            self.dsp(state) <= self.budget.dsp_budget
            and self.lutram(state) <= self.budget.lutram_budget
        )

    def step(
        self, state: State, index: int, variable: int, direction: int
    ) -> State | None:
        """Move one variable of one layer to the adjacent ladder value.

        Returns None when the variable is already at that end of its ladder.
        """
        ladder = self.ladders[index][variable]
        position = ladder.index(state[index][variable]) + direction
        if not 0 <= position < len(ladder):
            return None
        choice = list(state[index])
        choice[variable] = ladder[position]
        moved: LayerChoice = (choice[0], choice[1], choice[2])
        return state[:index] + (moved,) + state[index + 1 :]

    def design(self, state: State) -> DesignPoint:
        """DesignPoint for ``state`` with depth-0 buffers."""
        estimates = [self.estimate(i, choice) for i, choice in enumerate(state)]
        return DesignPoint(
            configs=tuple(self.config(choice) for choice in state),
            objective=self.objective(state),
            dsp_total=self.dsp(state),
            lutram_total=self.lutram(state),
            feasible=self.feasible(state),
            layers=tuple(layer.name for layer in self.net.layers),
            latencies=tuple(e.layer_latency_cycles for e in estimates),
            thetas=tuple(e.theta for e in estimates),
        )


class ConvergenceEntry(NamedTuple):
    """One annealing iteration."""

    iteration: int
    temperature: float
    objective: float
    accepted: bool


def design_to_dict(
    design: DesignPoint,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> dict[str, Any]:
    """JSON-friendly representation with one entry per layer."""
    layers = []
    for index, config in enumerate(design.configs):
        layers.append(
            {
                "name": design.layers[index] if design.layers else f"#{index}",
                "n_i": config.n_i,
                "n_o": config.n_o,
                "k": config.k,
                "w": config.buffer_depth,
                "latency_cycles": design.latencies[index] if design.latencies else None,
                "theta": design.thetas[index] if design.thetas else None,
                "dsp": dsp_usage(config),
                "lutram": lutram_usage(config),
            }
        )
    return {
        "objective": design.objective,
        "dsp_total": design.dsp_total,
        "lutram_total": design.lutram_total,
        "feasible": design.feasible,
        "model": str(model),
        "dense": dense,
        "layers": layers,
    }


def design_from_dict(data: dict[str, Any]) -> DesignPoint:
    """Inverse of :func:`design_to_dict`."""
    try:
        layers = data["layers"]
        return DesignPoint(
            configs=tuple(
                LayerConfig(entry["n_i"], entry["n_o"], entry["k"], entry["w"])
                for entry in layers
            ),
            objective=float(data["objective"]),
            dsp_total=int(data["dsp_total"]),
            lutram_total=int(data["lutram_total"]),
            feasible=bool(data["feasible"]),
            layers=tuple(str(entry["name"]) for entry in layers),
            latencies=tuple(float(entry["latency_cycles"]) for entry in layers),
            thetas=tuple(float(entry["theta"]) for entry in layers),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DesignFormatError(f"Invalid design document: {e}") from e


def save_design(
    design: DesignPoint,
    path: str | Path,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> Path:
    """Write a design document as indented JSON."""
    file_path = Path(path)
    file_path.write_text(
        json.dumps(design_to_dict(design, model, dense), indent=2) + "\n",
        encoding="utf-8",
    )
    return file_path


def load_design(path: str | Path) -> DesignPoint:
    """Read a design document written by :func:`save_design`."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DesignFormatError(f"Invalid JSON in {path}: {e.msg}") from e
    return design_from_dict(data)


def write_convergence_csv(
    history: Iterable[ConvergenceEntry], path: str | Path
) -> Path:
    """Write the annealing log with the columns in ``CONVERGENCE_COLUMNS``."""
    file_path = Path(path)
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CONVERGENCE_COLUMNS)
        for entry in history:
            writer.writerow(
                (
                    entry.iteration,
                    f"{entry.temperature:.6e}",
                    f"{entry.objective:.6e}",
                    int(entry.accepted),
                )
            )
    return file_path
