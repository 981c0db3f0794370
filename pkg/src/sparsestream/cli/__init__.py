"""Command-line interface: ``sparsestream <subcommand> ...``."""

from .main import build_parser, main
from .manifest import MANIFEST_NAME, RunManifest, Subcommand, load_manifest

__all__ = [
    "MANIFEST_NAME",
    "RunManifest",
    "Subcommand",
    "build_parser",
    "load_manifest",
    "main",
]
