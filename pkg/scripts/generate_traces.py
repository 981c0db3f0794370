#!/usr/bin/env python3
"""Script to generate synthetic traces for the bundled networks.

Writes one ``.sstr`` trace per layer of every network in ``data/networks``
into ``data/traces/<network>/``, using the same generator as
``sparsestream generate``.

Usage:
    python -m scripts.generate_traces
    # or after making executable:
    ./scripts/generate_traces.py [MODEL] [LENGTH]
"""

import sys
from pathlib import Path

from sparsestream.netspec import load_network
from sparsestream.trace import generate_network_traces, parse_model, save_trace
from sparsestream.utils.logging import Environment, setup_logging
from sparsestream.utils.safepath import create_safe_path, ensure_directory

logger = setup_logging(__name__, env=Environment.PRODUCTION)

ROOT = Path(__file__).resolve().parent.parent
MAX_STREAMS = 64


def main(argv: list[str] | None = None) -> int:
    """Generate traces for all bundled networks.

    Returns:
        0 for success, 1 for failure
    """
    args = sys.argv[1:] if argv is None else argv
    text = args[0] if args else "iid-bernoulli:0.65"
    length = int(args[1]) if len(args) > 1 else 1024
    try:
        model = parse_model(text)
        for path in sorted((ROOT / "data" / "networks").glob("*.json")):
            net = load_network(path)
            streams = [min(layer.c_in, MAX_STREAMS) for layer in net.layers]
            out = ensure_directory(ROOT / "data" / "traces" / path.stem)
            for trace in generate_network_traces(
                net.layers, streams, length, model, seed=0
            ):
                save_trace(trace, create_safe_path(out, f"{trace.layer}.sstr"))
        return 0
    except Exception as e:
        logger.error(f"Failed to generate traces: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
