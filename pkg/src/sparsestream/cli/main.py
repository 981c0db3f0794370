"""Command-line entry point.

Usage:
    sparsestream profile --traces a.sstr b.sstr --out runs/profile
    sparsestream sweep-engine --kx 3 --ky 3 --out runs/engine
    sparsestream dse --network data/networks/vgg16.json \
        --budget data/budgets/zc706.json --sparsity-model iid-bernoulli:0.65 \
        --out runs/vgg16
    sparsestream report runs/vgg16 --freq-mhz 200
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from typing import Final

from sparsestream import __version__
from sparsestream.analytic import ThroughputModel
from sparsestream.config import get_sparsestream_log_config
from sparsestream.const import (
    DEFAULT_EPSILON,
    DEFAULT_SWEEP_LENGTH,
    DEFAULT_W_MAX,
    PROFILE_DEPTHS,
    SWEEP_SPARSITY_STEP,
)
from sparsestream.types import SparseStreamError
from sparsestream.utils.logging import (
    Environment,
    LogLevel,
    reconfigure_loggers,
    setup_logging,
)

from . import commands
from .manifest import Subcommand

logger = setup_logging(__name__)

DEFAULT_TRACE_LENGTH: Final[int] = 4096
DEFAULT_MAX_STREAMS: Final[int] = 64

Handler = Callable[[argparse.Namespace], int]


def _add_common(parser: argparse.ArgumentParser, seed: bool = True) -> None:
    parser.add_argument("--out", required=True, help="output directory")
    if seed:
        parser.add_argument("--seed", type=int, default=0, help="random seed")


def _add_sparsity_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--traces", nargs="+", help="one trace file per layer")
    source.add_argument(
        "--sparsity-model",
        "--sparsity",
        dest="sparsity_model",
        help="synthetic model, e.g. iid-bernoulli:0.65 or markov-bursty:0.57:16",
    )
    parser.add_argument(
        "--length",
        type=int,
        default=DEFAULT_TRACE_LENGTH,
        help="windows per synthetic trace",
    )


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--model",
        choices=[m.value for m in ThroughputModel],
        default=ThroughputModel.EQ2.value,
        help="engine throughput estimate used by the analytic model",
    )
    parser.add_argument(
        "--dense", action="store_true", help="engines do not skip zeros"
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per subcommand."""
    parser = argparse.ArgumentParser(
        prog="sparsestream",
        description="Sparse streaming CNN accelerator simulator and DSE.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level",
        choices=[level.value for level in LogLevel],
        help="override the console log level",
    )
    parser.add_argument("--log-dir", help="also write a log file here")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(str(Subcommand.PROFILE), help="per-stream trace statistics")
    p.add_argument("--traces", nargs="+", required=True, help="trace files")
    _add_common(p, seed=False)
    p.set_defaults(func=commands.cmd_profile)

    p = sub.add_parser(
        str(Subcommand.SWEEP_ENGINE), help="OPs/cycle against sparsity"
    )
    p.add_argument("--kx", type=int, default=3)
    p.add_argument("--ky", type=int, default=3)
    p.add_argument(
        "--k", type=int, nargs="+", help="MAC counts (default 1..kx*ky)"
    )
    p.add_argument("--step", type=float, default=SWEEP_SPARSITY_STEP)
    p.add_argument("--length", type=int, default=DEFAULT_SWEEP_LENGTH)
    _add_common(p)
    p.set_defaults(func=commands.cmd_sweep_engine)

    p = sub.add_parser(
        str(Subcommand.SWEEP_BUFFER), help="overhead against buffer depth"
    )
    p.add_argument("--network", required=True)
    p.add_argument("--layer", help="layer name (default: first layer)")
    p.add_argument("--n-i", dest="n_i", type=int, required=True)
    p.add_argument("--n-o", dest="n_o", type=int, default=1)
    p.add_argument("--k", type=int, required=True)
    p.add_argument(
        "--depths", type=int, nargs="+", default=[0, *PROFILE_DEPTHS]
    )
    _add_sparsity_source(p)
    _add_model_flags(p)
    _add_common(p)
    p.set_defaults(func=commands.cmd_sweep_buffer)

    p = sub.add_parser(str(Subcommand.GENERATE), help="write synthetic traces")
    p.add_argument("--network", required=True)
    p.add_argument(
        "--sparsity-model", "--sparsity", dest="sparsity_model", required=True
    )
    p.add_argument(
        "--streams", type=int, help="streams per layer (default: C_in, capped)"
    )
    p.add_argument("--max-streams", type=int, default=DEFAULT_MAX_STREAMS)
    p.add_argument("--length", type=int, default=DEFAULT_TRACE_LENGTH)
    _add_common(p)
    p.set_defaults(func=commands.cmd_generate)

    for name, handler, text in (
        (Subcommand.MODEL, commands.cmd_model, "analytic per-layer estimates"),
        (Subcommand.SIMULATE, commands.cmd_simulate, "cycle-level simulation"),
    ):
        p = sub.add_parser(str(name), help=text)
        p.add_argument("--network", required=True)
        p.add_argument("--design", required=True, help="design.json from dse")
        _add_sparsity_source(p)
        _add_model_flags(p)
        _add_common(p)
        p.set_defaults(func=handler)

    p = sub.add_parser(str(Subcommand.DSE), help="allocate MACs and size buffers")
    p.add_argument("--network", required=True)
    p.add_argument("--budget", required=True)
    p.add_argument("--sa-config", help="annealing schedule JSON")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--w-max", dest="w_max", type=int, default=DEFAULT_W_MAX)
    p.add_argument(
        "--freq-mhz",
        dest="freq_mhz",
        type=float,
        help="clock for GOP/s in report.csv (default: synthesis table)",
    )
    _add_sparsity_source(p)
    _add_model_flags(p)
    _add_common(p)
    p.set_defaults(func=commands.cmd_dse)

    p = sub.add_parser(str(Subcommand.REPORT), help="summarise a dse run")
    p.add_argument("run_dir")
    p.add_argument(
        "--freq-mhz",
        dest="freq_mhz",
        type=float,
        help="clock for GOP/s (default: the dse run, then the synthesis table)",
    )
    p.set_defaults(func=commands.cmd_report)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    config = get_sparsestream_log_config(Environment.CLI, args.log_dir)
    if args.log_level:
        config.level = LogLevel(args.log_level)
    reconfigure_loggers("sparsestream", config)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    handler: Handler = args.func
    try:
        return handler(args)
    except (SparseStreamError, OSError) as e:
        logger.log_event(
            logging.DEBUG, "command failed", subcommand=args.subcommand, error=repr(e)
        )
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
