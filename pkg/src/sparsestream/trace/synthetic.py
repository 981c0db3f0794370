"""Synthetic sparsity traces.

Stand-ins for traces measured on real feature maps. Three element-level
models are available:

- ``iid-bernoulli``: every element is zero with probability ``p_zero``
  (a single value or one value per stream).
- ``markov-bursty``: a two-state chain over the flattened element sequence
  of each stream, zero runs have mean length ``burst_length`` and the
  stationary zero probability is ``p_zero``.
- ``constant``: every window holds exactly ``round(p_zero * K)`` zeros at
  random positions, so the instantaneous sparsity never changes.

Models can also be given as strings for the command line, for example
``"iid-bernoulli:0.65"``, ``"markov-bursty:0.57:16"`` or ``"constant:0.65"``.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from sparsestream.netspec import LayerSpec
from sparsestream.types import ConfigError
from sparsestream.utils.logging import setup_logging

from .model import BoolArray, SparsityTrace

logger = setup_logging(__name__)


def _check_probability(value: float, name: str = "p_zero") -> float:
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class IidBernoulli:
    """Independent zeros with probability ``p_zero`` (scalar or per stream)."""

    p_zero: float | tuple[float, ...]

    name = "iid-bernoulli"

    def __post_init__(self) -> None:
        """Validate probabilities."""
        if isinstance(self.p_zero, tuple):
            if not self.p_zero:
                raise ConfigError("Per-stream p_zero must not be empty")
            for value in self.p_zero:
                _check_probability(value)
        else:
            _check_probability(self.p_zero)

    @property
    def mean_sparsity(self) -> float:
        """Mean zero probability over streams."""
        if isinstance(self.p_zero, tuple):
            return sum(self.p_zero) / len(self.p_zero)
        return float(self.p_zero)

    def probabilities(self, streams: int) -> tuple[float, ...]:
        """Zero probability of each of ``streams`` streams."""
        if isinstance(self.p_zero, tuple):
            if len(self.p_zero) != streams:
                raise ConfigError(
                    f"Model gives {len(self.p_zero)} probabilities "
                    f"for {streams} streams"
                )
            return tuple(float(p) for p in self.p_zero)
        return tuple(float(self.p_zero) for _ in range(streams))


@dataclass(frozen=True)
class MarkovBursty:
    """Bursty zeros from a two-state Markov chain."""

    p_zero: float
    burst_length: float

    name = "markov-bursty"

    def __post_init__(self) -> None:
        """Validate that the chain exists for these parameters."""
        _check_probability(self.p_zero)
        if not self.burst_length >= 1.0:
            raise ConfigError(
                f"burst_length must be >= 1, got {self.burst_length}"
            )
        if 0.0 < self.p_zero < 1.0 and self.nonzero_to_zero > 1.0:
            raise ConfigError(
                f"p_zero={self.p_zero} needs burst_length >= "
                f"{self.p_zero / (1.0 - self.p_zero):.3g}"
            )

    @property
    def mean_sparsity(self) -> float:
        """Stationary zero probability."""
        return float(self.p_zero)

    @property
    def zero_to_nonzero(self) -> float:
        """Probability of leaving a zero run at each element."""
        return 1.0 / self.burst_length

    @property
    def nonzero_to_zero(self) -> float:
        """Probability of entering a zero run, chosen to give ``p_zero``."""
        if self.p_zero >= 1.0:
            return 1.0
        return self.p_zero / (self.burst_length * (1.0 - self.p_zero))


@dataclass(frozen=True)
class Constant:
    """Exactly the same number of zeros in every window."""

    p_zero: float

    name = "constant"

    def __post_init__(self) -> None:
        """Validate the probability."""
        _check_probability(self.p_zero)

    @property
    def mean_sparsity(self) -> float:
        """Requested zero fraction (before rounding to whole elements)."""
        return float(self.p_zero)


SparsityModel = IidBernoulli | MarkovBursty | Constant


def parse_model(text: str) -> SparsityModel:
    """Parse ``name:param[:param]`` into a sparsity model.

    Raises:
        ConfigError: If the name is unknown or parameters are malformed.
    """
    name, _, rest = text.strip().partition(":")
    try:
        params = [float(part) for part in rest.split(":")] if rest else []
    except ValueError as e:
        raise ConfigError(f"Invalid model parameters in {text!r}") from e

    if name == IidBernoulli.name and len(params) == 1:
        return IidBernoulli(params[0])
    if name == IidBernoulli.name and len(params) > 1:
        return IidBernoulli(tuple(params))
    if name == MarkovBursty.name and len(params) == 2:  # noqa: PLR2004
        return MarkovBursty(params[0], params[1])
    if name == Constant.name and len(params) == 1:
        return Constant(params[0])
    raise ConfigError(
        f"Unknown model {text!r}; expected iid-bernoulli:P[:P...], "
        f"markov-bursty:P:L or constant:P"
    )


def _iid_masks(
    model: IidBernoulli, rng: np.random.Generator, shape: tuple[int, int, int]
) -> BoolArray:
    p_zero = np.asarray(model.probabilities(shape[0]), dtype=float)
    return rng.random(shape) >= p_zero[:, None, None]


def _markov_stream(
    model: MarkovBursty, rng: np.random.Generator, size: int
) -> BoolArray:
    if model.p_zero <= 0.0:
        return np.ones(size, dtype=bool)
    if model.p_zero >= 1.0:
        return np.zeros(size, dtype=bool)

    # Alternate geometric zero and non-zero runs until the stream is covered.
    zero_runs: list[np.ndarray] = []
    nonzero_runs: list[np.ndarray] = []
    covered = 0
    start_nonzero = bool(rng.random() >= model.p_zero)
    batch = max(16, int(size * model.nonzero_to_zero) + 16)
    while covered < size:
        zeros = rng.geometric(model.zero_to_nonzero, batch)
        nonzeros = rng.geometric(model.nonzero_to_zero, batch)
        zero_runs.append(zeros)
        nonzero_runs.append(nonzeros)
        covered += int(zeros.sum() + nonzeros.sum())

    zero_lengths = np.concatenate(zero_runs)
    nonzero_lengths = np.concatenate(nonzero_runs)
    lengths = np.empty(2 * len(zero_lengths), dtype=np.int64)
    values = np.empty(2 * len(zero_lengths), dtype=bool)
    if start_nonzero:
        lengths[0::2], lengths[1::2] = nonzero_lengths, zero_lengths
        values[0::2], values[1::2] = True, False
    else:
        lengths[0::2], lengths[1::2] = zero_lengths, nonzero_lengths
        values[0::2], values[1::2] = False, True
    return np.repeat(values, lengths)[:size]


def _constant_masks(
    model: Constant, rng: np.random.Generator, shape: tuple[int, int, int]
) -> BoolArray:
    window = shape[2]
    zeros = round(model.p_zero * window)
    if not math.isclose(zeros, model.p_zero * window):
        logger.warning(
            f"p_zero={model.p_zero} is not a multiple of 1/{window}; "
            f"using {zeros} zeros per window"
        )
    # Rank random keys per window; the ``zeros`` smallest become zero.
    ranks = rng.random(shape).argsort(axis=2).argsort(axis=2)
    return ranks >= zeros


def generate_synthetic_trace(
    layer: LayerSpec,
    streams: int,
    length: int,
    model: SparsityModel,
    seed: int,
) -> SparsityTrace:
    """Generate a trace for ``layer`` with ``streams`` streams of ``length`` windows.

    The output depends only on the arguments; the same seed always gives the
    same masks.

    Raises:
        ConfigError: If the model parameters are invalid or the sizes are < 1.
    """
    if streams < 1 or length < 1:
        raise ConfigError(
            f"Need at least one stream and one window, got {streams}x{length}"
        )
    rng = np.random.default_rng(seed)
    shape = (streams, length, layer.kernel_size)

    if isinstance(model, IidBernoulli):
        masks = _iid_masks(model, rng, shape)
    elif isinstance(model, MarkovBursty):
        size = length * layer.kernel_size
        masks = np.stack(
            [_markov_stream(model, rng, size) for _ in range(streams)]
        ).reshape(shape)
    elif isinstance(model, Constant):
        masks = _constant_masks(model, rng, shape)
    else:
        raise ConfigError(f"Unsupported sparsity model {model!r}")

    logger.log_event(
        logging.DEBUG,
        "synthetic trace generated",
        layer=layer.name,
        model=model.name,
        streams=streams,
        length=length,
        seed=seed,
    )
    return SparsityTrace(layer=layer.name, masks=masks)


def generate_network_traces(
    layers: Sequence[LayerSpec],
    streams: Sequence[int],
    length: int,
    model: SparsityModel,
    seed: int,
) -> list[SparsityTrace]:
    """One trace per layer, seeded ``seed``, ``seed + 1``, ... in layer order."""
    if len(layers) != len(streams):
        raise ConfigError(
            f"Need one stream count per layer, got {len(streams)} for {len(layers)}"
        )
    return [
        generate_synthetic_trace(layer, count, length, model, seed + index)
        for index, (layer, count) in enumerate(zip(layers, streams, strict=True))
    ]
