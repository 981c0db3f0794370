"""Fixtures and configuration settings for pytest tests.

Fixtures:
    toy_net: Three small 3x3 layers that simulate in milliseconds.
    toy_budget: Budget that fits several toy designs but not all of them.
    data_dir: Path to the bundled ``data`` directory.
    vgg: The bundled VGG16 description.
    bernoulli_trace: Factory for i.i.d. traces of a given shape.

Functions:
    pytest_configure: Registers custom markers.
"""

from collections.abc import Callable, Generator
from pathlib import Path

import pytest
from _pytest.config import Config

from sparsestream.netspec import LayerSpec, NetworkSpec, ResourceBudget, load_network
from sparsestream.trace import IidBernoulli, SparsityTrace, generate_synthetic_trace
from sparsestream.utils.logging import Environment
from sparsestream.utils.logging.config import ENV_VARIABLE

from tests.config import TRACES

ROOT = Path(__file__).resolve().parent.parent

TraceFactory = Callable[..., SparsityTrace]


def pytest_configure(config: Config) -> None:
    """Configure pytest with custom markers.

    Args:
        config: pytest configuration object
    """
    # Register custom markers to prevent pytest warnings
    config.addinivalue_line(
        "markers",
        "unit: marks unit tests that test individual components in isolation",
    )
    config.addinivalue_line(
        "markers",
        "integration: marks integration tests that test component interactions",
    )
    config.addinivalue_line(
        "markers",
        "validation: marks tests that check published reference figures",
    )
    config.addinivalue_line(
        "markers",
        "slow: marks tests that take longer to execute",
    )


@pytest.fixture(autouse=True)
def _test_environment(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Run every test with the test logging environment."""
    monkeypatch.setenv(ENV_VARIABLE, Environment.TEST.value)
    yield


@pytest.fixture
def data_dir() -> Path:
    """Provide path to the bundled data directory."""
    return ROOT / "data"


@pytest.fixture
def toy_net() -> NetworkSpec:
    """Three small convolution layers."""
    return NetworkSpec(
        layers=(
            LayerSpec("conv1", 4, 8, 8, 8, 3, 3),
            LayerSpec("conv2", 8, 8, 8, 8, 3, 3),
            LayerSpec("conv3", 8, 16, 4, 4, 3, 3),
        )
    )


@pytest.fixture
def toy_budget() -> ResourceBudget:
    """Budget for the toy network."""
    return ResourceBudget(dsp_budget=64, lutram_budget=8000)


@pytest.fixture
def vgg(data_dir: Path) -> NetworkSpec:
    """The bundled VGG16 description."""
    return load_network(data_dir / "networks" / "vgg16.json")


@pytest.fixture
def bernoulli_trace() -> TraceFactory:
    """Factory for i.i.d. Bernoulli traces.

    Returns:
        Callable taking ``p_zero``, ``streams``, ``length`` and an optional
        ``layer`` and ``seed``.
    """

    def make(
        p_zero: float,
        streams: int,
        length: int,
        layer: LayerSpec | None = None,
        seed: int = TRACES.seed,
    ) -> SparsityTrace:
        spec = layer or LayerSpec("bench", 8, 8, 4, 4, 3, 3)
        return generate_synthetic_trace(
            spec, streams, length, IidBernoulli(p_zero), seed
        )

    return make
