"""CNN workload descriptions, resource budgets and their JSON file format.

A network is a linear pipeline of convolutional layers. Each layer gives its
output dimensions directly; no stride or padding arithmetic is done here.

Network file::

    {"batch_size": 1,
     "layers": [{"name": "conv1", "c_in": 3, "c_out": 64,
                 "h_out": 224, "w_out": 224, "k_x": 3, "k_y": 3}]}

Budget file::

    {"dsp": 512, "lutram": 20000}
"""

import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Final

from .types import DspCount, LutramCount, NetworkParseError, NetworkSpecError
from .utils.logging import setup_logging

logger = setup_logging(__name__)

LAYER_KEYS: Final[tuple[str, ...]] = (
    "name",
    "c_in",
    "c_out",
    "h_out",
    "w_out",
    "k_x",
    "k_y",
)
NETWORK_KEYS: Final[tuple[str, ...]] = ("batch_size", "layers")
BUDGET_KEYS: Final[tuple[str, ...]] = ("dsp", "lutram")


@dataclass(frozen=True)
class LayerSpec:
    """Shape of one convolutional layer.

    Attributes:
        name: Layer identifier.
        c_in: Input channels (C_I).
        c_out: Output channels (C_O).
        h_out: Output feature-map height in pixels (H_O).
        w_out: Output feature-map width in pixels (W_O).
        k_x: Kernel width.
        k_y: Kernel height.
    """

    name: str
    c_in: int
    c_out: int
    h_out: int
    w_out: int
    k_x: int
    k_y: int

    def __post_init__(self) -> None:
        """Check that the name is set and every dimension is at least 1."""
        if not isinstance(self.name, str) or not self.name:
            raise NetworkSpecError("Layer name must be a non-empty string")
        for spec_field in fields(self)[1:]:
            value = getattr(self, spec_field.name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise NetworkSpecError(
                    f"Dimension must be an integer, got {value!r}",
                    layer=self.name,
                    field=spec_field.name,
                )
            if value < 1:
                raise NetworkSpecError(
                    f"Dimension must be >= 1, got {value}",
                    layer=self.name,
                    field=spec_field.name,
                )

    @property
    def kernel_size(self) -> int:
        """Number of elements in one kernel window (K_x * K_y)."""
        return self.k_x * self.k_y


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered list of layers forming the streaming pipeline."""

    layers: tuple[LayerSpec, ...]
    batch_size: int = 1

    def __post_init__(self) -> None:
        """Check batch size, layer count and layer-name uniqueness."""
        if isinstance(self.batch_size, bool) or not isinstance(self.batch_size, int):
            raise NetworkSpecError("batch_size must be an integer", field="batch_size")
        if self.batch_size < 1:
            raise NetworkSpecError(
                f"batch_size must be >= 1, got {self.batch_size}", field="batch_size"
            )
        if len(self.layers) < 1:
            raise NetworkSpecError("Network needs at least one layer", field="layers")
        seen: set[str] = set()
        for layer in self.layers:
            if layer.name in seen:
                raise NetworkSpecError(
                    "Duplicate layer name", layer=layer.name, field="name"
                )
            seen.add(layer.name)

    def __len__(self) -> int:
        """Number of layers (L)."""
        return len(self.layers)

    def layer(self, name: str) -> LayerSpec:
        """Look up a layer by name."""
        for layer in self.layers:
            if layer.name == name:
                return layer
        raise KeyError(name)


@dataclass(frozen=True)
class ResourceBudget:
    """Hard caps on MAC units and buffer memory."""

    dsp_budget: DspCount
    lutram_budget: LutramCount

    def __post_init__(self) -> None:
        """Check that both budgets are non-negative integers."""
        for name, value in (("dsp", self.dsp_budget), ("lutram", self.lutram_budget)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise NetworkSpecError(
                    f"Budget must be a non-negative integer, got {value!r}",
                    field=name,
                )


def layer_workload(layer: LayerSpec) -> int:
    """Dense MAC count per image: H_O * W_O * C_I * C_O * K_x * K_y."""
    return (
        layer.h_out
        * layer.w_out
        * layer.c_in
        * layer.c_out
        * layer.k_x
        * layer.k_y
    )


def total_workload(net: NetworkSpec) -> int:
    """Dense MAC count per image over all layers."""
    return sum(layer_workload(layer) for layer in net.layers)


def _check_keys(
    data: Mapping[str, Any], expected: Sequence[str], layer: str | None = None
) -> None:
    for key in expected:
        if key not in data:
            raise NetworkSpecError("Missing field", layer=layer, field=key)
    for key in data:
        if key not in expected:
            raise NetworkSpecError("Unknown field", layer=layer, field=str(key))


def network_from_dict(data: Any) -> NetworkSpec:
    """Build a validated NetworkSpec from parsed JSON data.

    Raises:
        NetworkSpecError: If the schema or any invariant is violated. The error
            names the offending layer and field.
    """
    if not isinstance(data, dict):
        raise NetworkSpecError("Network document must be a JSON object")
    _check_keys(data, NETWORK_KEYS)
    raw_layers = data["layers"]
    if not isinstance(raw_layers, list):
        raise NetworkSpecError("layers must be an array", field="layers")

    layers = []
    for index, raw in enumerate(raw_layers):
        if not isinstance(raw, dict):
            raise NetworkSpecError("Layer must be an object", layer=f"#{index}")
        label = raw.get("name", f"#{index}")
        _check_keys(raw, LAYER_KEYS, layer=str(label))
        layers.append(LayerSpec(**{key: raw[key] for key in LAYER_KEYS}))

    return NetworkSpec(layers=tuple(layers), batch_size=data["batch_size"])


def network_to_dict(net: NetworkSpec) -> dict[str, Any]:
    """Serialise a NetworkSpec to the network-file schema."""
    return {
        "batch_size": net.batch_size,
        "layers": [asdict(layer) for layer in net.layers],
    }


def _read_json(path: str | Path) -> Any:
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read {file_path}: {e}")
        raise
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkParseError(
            f"Invalid JSON in {file_path}: {e.msg}", line=e.lineno, column=e.colno
        ) from e


def load_network(path: str | Path) -> NetworkSpec:
    """Load and validate a network file.

    Raises:
        NetworkParseError: If the file is not valid JSON (with line/column).
        NetworkSpecError: If a field is missing, unknown or out of range.
        OSError: If the file cannot be read.
    """
    net = network_from_dict(_read_json(path))
    logger.log_event(logging.DEBUG, "network loaded", path=str(path), layers=len(net))
    return net


def save_network(net: NetworkSpec, path: str | Path) -> None:
    """Write a network file that :func:`load_network` reads back unchanged."""
    Path(path).write_text(
        json.dumps(network_to_dict(net), indent=2) + "\n", encoding="utf-8"
    )


def budget_to_dict(budget: ResourceBudget) -> dict[str, int]:
    """Serialise a ResourceBudget to the budget-file schema."""
    return {"dsp": budget.dsp_budget, "lutram": budget.lutram_budget}


def load_budget(path: str | Path) -> ResourceBudget:
    """Load and validate a budget file with ``dsp`` and ``lutram`` fields."""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise NetworkSpecError("Budget document must be a JSON object")
    _check_keys(data, BUDGET_KEYS)
    return ResourceBudget(dsp_budget=data["dsp"], lutram_budget=data["lutram"])


def _conv(name: str, c_in: int, c_out: int, size: int, kernel: int = 3) -> LayerSpec:
    return LayerSpec(name, c_in, c_out, size, size, kernel, kernel)


def vgg16(batch_size: int = 1) -> NetworkSpec:
    """The 13 convolutional layers of VGG16 for 224x224 inputs."""
    plan = [
        ("conv1_1", 3, 64, 224),
        ("conv1_2", 64, 64, 224),
        ("conv2_1", 64, 128, 112),
        ("conv2_2", 128, 128, 112),
        ("conv3_1", 128, 256, 56),
        ("conv3_2", 256, 256, 56),
        ("conv3_3", 256, 256, 56),
        ("conv4_1", 256, 512, 28),
        ("conv4_2", 512, 512, 28),
        ("conv4_3", 512, 512, 28),
        ("conv5_1", 512, 512, 14),
        ("conv5_2", 512, 512, 14),
        ("conv5_3", 512, 512, 14),
    ]
    return NetworkSpec(
        layers=tuple(_conv(*entry) for entry in plan), batch_size=batch_size
    )


def resnet18(batch_size: int = 1) -> NetworkSpec:
    """ResNet-18 convolutions flattened into a layer list (shortcuts included)."""
    layers = [_conv("conv1", 3, 64, 112, kernel=7)]
    layers += [_conv(f"layer1_{i}", 64, 64, 56) for i in range(1, 5)]
    for stage, (c_in, c_out, size) in enumerate(
        [(64, 128, 28), (128, 256, 14), (256, 512, 7)], start=2
    ):
        layers.append(_conv(f"layer{stage}_1", c_in, c_out, size))
        layers += [_conv(f"layer{stage}_{i}", c_out, c_out, size) for i in (2, 3, 4)]
        layers.append(_conv(f"layer{stage}_down", c_in, c_out, size, kernel=1))
    return NetworkSpec(layers=tuple(layers), batch_size=batch_size)
