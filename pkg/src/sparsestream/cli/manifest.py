"""Run manifests written next to every command's outputs."""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Final

from sparsestream.types import ManifestError
from sparsestream.utils.safepath import create_safe_path

MANIFEST_NAME: Final[str] = "manifest.json"


class Subcommand(str, Enum):
    """Command-line subcommands."""

    PROFILE = "profile"
    SWEEP_ENGINE = "sweep-engine"
    SWEEP_BUFFER = "sweep-buffer"
    GENERATE = "generate"
    SIMULATE = "simulate"
    MODEL = "model"
    DSE = "dse"
    REPORT = "report"

    def __str__(self) -> str:
        """Return the command-line spelling."""
        return self.value


@dataclass(frozen=True)
class RunManifest:
    """Inputs and settings of one run.

    Holds no timestamps, so identical runs write identical manifests.
    """

    subcommand: Subcommand
    output_dir: str
    inputs: dict[str, list[str]] = field(default_factory=dict)
    seed: int | None = None
    frequency_mhz: float | None = None
    options: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    version: str = "0.0.0"

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly representation."""
        return {
            "subcommand": str(self.subcommand),
            "output_dir": self.output_dir,
            "inputs": self.inputs,
            "seed": self.seed,
            "frequency_mhz": self.frequency_mhz,
            "options": self.options,
            "outputs": self.outputs,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunManifest":
        """Inverse of :meth:`to_dict`."""
        try:
            return cls(
                subcommand=Subcommand(data["subcommand"]),
                output_dir=str(data["output_dir"]),
                inputs={k: list(v) for k, v in data.get("inputs", {}).items()},
                seed=data.get("seed"),
                frequency_mhz=data.get("frequency_mhz"),
                options=dict(data.get("options", {})),
                outputs=list(data.get("outputs", [])),
                version=str(data.get("version", "0.0.0")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"Invalid manifest: {e}") from e

    def write(self, directory: str | Path) -> Path:
        """Write ``manifest.json`` into ``directory``."""
        path = create_safe_path(directory, MANIFEST_NAME)
        path.write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return path


def load_manifest(directory: str | Path) -> RunManifest:
    """Read the manifest of a run directory.

    Raises:
        ManifestError: If the manifest is missing or invalid.
    """
    path = create_safe_path(directory, MANIFEST_NAME)
    if not path.is_file():
        raise ManifestError(f"Run directory {directory} is incomplete", [MANIFEST_NAME])
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ManifestError(f"Invalid JSON in {path}: {e.msg}") from e
    return RunManifest.from_dict(data)
