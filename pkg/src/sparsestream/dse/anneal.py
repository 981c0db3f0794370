"""Simulated-annealing allocation of MACs across layers.

The state is (N_I, N_O, k) per layer. A move picks a random layer and one
of its variables and shifts it to the adjacent legal value: the next or
previous divisor for N_I and N_O, k +- 1. Candidates over budget are
rejected outright, the rest go through Metropolis acceptance on the energy
``-log(objective)``. The chain starts from the greedy design and the best
state seen is returned, so the result is never worse than greedy.
"""

import json
import logging
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from sparsestream.analytic import ThroughputModel
from sparsestream.const import (
    DEFAULT_COOLING_RATE,
    DEFAULT_INITIAL_TEMPERATURE,
    DEFAULT_ITERATIONS_PER_TEMPERATURE,
    DEFAULT_MIN_TEMPERATURE_RATIO,
    DEFAULT_CALIBRATION_MOVES,
    DEFAULT_UPHILL_ACCEPTANCE,
)
from sparsestream.netspec import NetworkSpec, ResourceBudget
from sparsestream.trace import SparsityStats
from sparsestream.types import ConfigError
from sparsestream.utils.logging import setup_logging

from .design import ConvergenceEntry, DesignPoint, DesignSpace, State
from .search import greedy_state

logger = setup_logging(__name__)

MOVE_VARIABLES = 3


@dataclass(frozen=True)
class AnnealSchedule:
    """Annealing hyperparameters.

    Attributes:
        initial_temperature: Starting temperature; None calibrates it so that
            80% of uphill moves are accepted over 100 trial moves.
        cooling_rate: Geometric cooling factor in (0, 1).
        iterations_per_temperature: Moves tried at each temperature.
        min_temperature: Stop temperature; None means 1e-4 of the initial one.
        seed: Seed of the move and acceptance generator.
    """

    initial_temperature: float | None = None
    cooling_rate: float = DEFAULT_COOLING_RATE
    iterations_per_temperature: int = DEFAULT_ITERATIONS_PER_TEMPERATURE
    min_temperature: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        """Validate ranges."""
        if self.initial_temperature is not None and not self.initial_temperature > 0:
            raise ConfigError(
                f"initial_temperature must be > 0, got {self.initial_temperature}"
            )
        if not 0.0 < self.cooling_rate < 1.0:
            raise ConfigError(
                f"cooling_rate must be in (0, 1), got {self.cooling_rate}"
            )
        if (
            isinstance(self.iterations_per_temperature, bool)
            or not isinstance(self.iterations_per_temperature, int)
            or self.iterations_per_temperature < 1
        ):
            raise ConfigError(
                "iterations_per_temperature must be an integer >= 1, "
                f"got {self.iterations_per_temperature!r}"
            )
        if self.min_temperature is not None and not self.min_temperature > 0:
            raise ConfigError(
                f"min_temperature must be > 0, got {self.min_temperature}"
            )
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")

    def with_seed(self, seed: int) -> "AnnealSchedule":
        """Copy with another seed."""
        return AnnealSchedule(
            self.initial_temperature,
            self.cooling_rate,
            self.iterations_per_temperature,
            self.min_temperature,
            seed,
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly representation."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AnnealSchedule":
        """Build a schedule; missing keys keep their defaults.

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        if not isinstance(data, dict):
            raise ConfigError("Annealing config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown annealing config keys: {', '.join(unknown)}")
        return cls(**data)


def load_schedule(path: str | Path) -> AnnealSchedule:
    """Read an AnnealSchedule from a JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e.msg}") from e
    return AnnealSchedule.from_dict(data)


@dataclass(frozen=True)
class AnnealResult:
    """Best design found and the per-iteration log of the chain."""

    design: DesignPoint
    greedy: DesignPoint
    initial_temperature: float
    history: tuple[ConvergenceEntry, ...] = field(default=(), repr=False)


def _random_move(
    space: DesignSpace, state: State, rng: np.random.Generator
) -> State | None:
    index = int(rng.integers(space.num_layers))
    variable = int(rng.integers(MOVE_VARIABLES))
    direction = 1 if rng.random() < 0.5 else -1  # noqa: PLR2004
    moved = space.step(state, index, variable, direction)
    if moved is None:
        moved = space.step(state, index, variable, -direction)
    return moved


def calibrate_temperature(
    space: DesignSpace,
    state: State,
    rng: np.random.Generator,
    trials: int = DEFAULT_CALIBRATION_MOVES,
    acceptance: float = DEFAULT_UPHILL_ACCEPTANCE,
) -> float:
    """Temperature at which the mean uphill move is accepted with ``acceptance``.

    Draws ``trials`` random feasible moves from ``state``. Falls back to
    ``DEFAULT_INITIAL_TEMPERATURE`` when no trial goes uphill.
    """
    energy = space.energy(state)
    uphill = []
    for _ in range(trials):
        candidate = _random_move(space, state, rng)
        if candidate is None or not space.feasible(candidate):
            continue
        delta = space.energy(candidate) - energy
        if delta > 0.0:
            uphill.append(delta)
    if not uphill:
        return DEFAULT_INITIAL_TEMPERATURE
    return -float(np.mean(uphill)) / math.log(acceptance)


def anneal(
    net: NetworkSpec,
    stats: Sequence[SparsityStats],
    budget: ResourceBudget,
    schedule: AnnealSchedule | None = None,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> AnnealResult:
    """Run the annealer and keep its convergence log.

    Raises:
        InfeasibleDesignError: If the budget cannot hold the minimal design.
    """
    schedule = schedule or AnnealSchedule()
    space = DesignSpace(net, stats, budget, model, dense)
    start = greedy_state(space)
    rng = np.random.default_rng(schedule.seed)

    temperature = schedule.initial_temperature or calibrate_temperature(
        space, start, rng
    )
    initial = temperature
    floor = schedule.min_temperature or initial * DEFAULT_MIN_TEMPERATURE_RATIO

    current, energy = start, space.energy(start)
    best, best_key = start, (energy, space.dsp(start))
    history: list[ConvergenceEntry] = []
    iteration = 0
    while temperature >= floor:
        for _ in range(schedule.iterations_per_temperature):
            accepted = False
            candidate = _random_move(space, current, rng)
            if candidate is not None and space.feasible(candidate):
                candidate_energy = space.energy(candidate)
                delta = candidate_energy - energy
                if delta <= 0.0 or rng.random() < math.exp(-delta / temperature):
                    current, energy = candidate, candidate_energy
                    accepted = True
                    key = (energy, space.dsp(current))
                    if key < best_key:
                        best, best_key = current, key
            history.append(
                ConvergenceEntry(
                    iteration, temperature, space.objective(current), accepted
                )
            )
            iteration += 1
        logger.log_event(
            logging.DEBUG,
            "temperature step",
            temperature=temperature,
            objective=space.objective(current),
        )
        temperature *= schedule.cooling_rate

    result = AnnealResult(
        design=space.design(best),
        greedy=space.design(start),
        initial_temperature=initial,
        history=tuple(history),
    )
    logger.log_event(
        logging.INFO,
        "annealing finished",
        seed=schedule.seed,
        iterations=iteration,
        initial_temperature=initial,
        objective=result.design.objective,
        greedy_objective=result.greedy.objective,
        dsp=result.design.dsp_total,
    )
    return result


def allocate_macs(
    net: NetworkSpec,
    stats: Sequence[SparsityStats],
    budget: ResourceBudget,
    schedule: AnnealSchedule | None = None,
    model: ThroughputModel = ThroughputModel.EQ2,
    dense: bool = False,
) -> DesignPoint:
    """Best feasible design found by simulated annealing.

    The same seed always reproduces the same design.

    Raises:
        InfeasibleDesignError: If the budget cannot hold the minimal design.
    """
    return anneal(net, stats, budget, schedule, model, dense).design
