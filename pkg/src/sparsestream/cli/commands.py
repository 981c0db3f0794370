"""Implementations of the command-line subcommands.

Every command writes its outputs and a ``manifest.json`` into ``--out`` and
returns the process exit status. Library errors propagate to
:func:`sparsestream.cli.main.main`, which turns them into diagnostics.
"""

import argparse
import csv
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Final, TextIO

from sparsestream import __version__
from sparsestream.analytic import (
    LayerConfig,
    ThroughputModel,
    dsp_usage,
    layer_estimate,
    lutram_usage,
    stream_means,
)
from sparsestream.const import PROFILE_DEPTHS
from sparsestream.dse import (
    AnnealSchedule,
    OptimisationResult,
    fit_streams,
    load_design,
    load_schedule,
    optimise_network,
    optimise_synthetic,
    save_design,
    write_convergence_csv,
)
from sparsestream.engine_sim import sparsity_grid, sweep_engine, write_sweep_csv
from sparsestream.netspec import (
    NetworkSpec,
    budget_to_dict,
    load_budget,
    load_network,
    save_network,
)
from sparsestream.pipeline_sim import (
    simulate_buffer_sweep,
    simulate_network,
    write_buffer_sweep_csv,
    write_report_csv,
)
from sparsestream.trace import (
    SparsityStats,
    SparsityTrace,
    compute_stats,
    generate_network_traces,
    generate_synthetic_trace,
    load_trace,
    parse_model,
    rho_sweep,
    save_trace,
)
from sparsestream.types import ConfigError, ManifestError, SparseStreamError
from sparsestream.utils.logging import setup_logging
from sparsestream.utils.safepath import (
    create_safe_path,
    ensure_directory,
    missing_files,
)

from .manifest import RunManifest, Subcommand, load_manifest
from .report import (
    REPORT_NAME,
    DesignReport,
    build_report,
    measurements_from_reports,
    print_report,
    read_measurements,
    resolve_frequency,
    save_report_csv,
)

logger = setup_logging(__name__)

PROFILE_NAME: Final[str] = "profile.csv"
SWEEP_ENGINE_NAME: Final[str] = "sweep_engine.csv"
SWEEP_BUFFER_NAME: Final[str] = "buffer_sweep.csv"
MODEL_NAME: Final[str] = "model.csv"
SIMULATION_NAME: Final[str] = "simulation.csv"
DESIGN_NAME: Final[str] = "design.json"
CONVERGENCE_NAME: Final[str] = "convergence.csv"
NETWORK_NAME: Final[str] = "network.json"
BUDGET_NAME: Final[str] = "budget.json"
TRACE_DIR: Final[str] = "traces"
REPORT_ARTIFACTS: Final[tuple[str, ...]] = (
    DESIGN_NAME,
    SIMULATION_NAME,
    NETWORK_NAME,
)


def _write_manifest(
    args: argparse.Namespace,
    subcommand: Subcommand,
    outputs: Sequence[str],
    inputs: dict[str, list[str]] | None = None,
    options: dict[str, Any] | None = None,
) -> Path:
    manifest = RunManifest(
        subcommand=subcommand,
        output_dir=str(args.out),
        inputs=inputs or {},
        seed=getattr(args, "seed", None),
        frequency_mhz=getattr(args, "freq_mhz", None),
        options=options or {},
        outputs=list(outputs),
        version=__version__,
    )
    return manifest.write(args.out)


def _announce(path: Path) -> None:
    logger.log_event(logging.INFO, "output written", path=str(path))


def _load_traces(paths: Sequence[str], net: NetworkSpec) -> list[SparsityTrace]:
    if len(paths) != len(net):
        raise ConfigError(
            f"Need one trace per layer: {len(net)} layers, {len(paths)} traces"
        )
    traces = [load_trace(path) for path in paths]
    for layer, trace in zip(net.layers, traces, strict=True):
        if trace.layer != layer.name:
            logger.warning(
                f"Trace for {layer.name} is labelled {trace.layer!r}; "
                f"using it in layer order"
            )
    return traces


def _layer_stats(args: argparse.Namespace, net: NetworkSpec) -> list[SparsityStats]:
    if args.traces:
        return [compute_stats(trace) for trace in _load_traces(args.traces, net)]
    model = parse_model(args.sparsity_model)
    return [SparsityStats.uniform(model.mean_sparsity) for _ in net.layers]


def _design_traces(
    args: argparse.Namespace, net: NetworkSpec, configs: Sequence[LayerConfig]
) -> list[SparsityTrace]:
    streams = [config.n_i for config in configs]
    if args.traces:
        traces = _load_traces(args.traces, net)
        return [
            fit_streams(trace, count)
            for trace, count in zip(traces, streams, strict=True)
        ]
    model = parse_model(args.sparsity_model)
    return generate_network_traces(net.layers, streams, args.length, model, args.seed)


def cmd_profile(args: argparse.Namespace) -> int:
    """Per-stream statistics and rho_w of every trace file."""
    out = ensure_directory(args.out)
    header = ["trace", "layer", "stream", "mean", "variance"] + [
        f"rho_{w}" for w in PROFILE_DEPTHS
    ]
    rows: list[list[Any]] = []
    failures = 0
    for path in args.traces:
        try:
            trace = load_trace(path)
            stats = compute_stats(trace)
            depths = [w for w in PROFILE_DEPTHS if w <= trace.length]
            rho = rho_sweep(trace, depths) if trace.num_streams > 1 else {}
        except (SparseStreamError, OSError) as e:
            failures += 1
            logger.error(f"{path}: {e}")
            print(f"error: {path}: {e}", file=sys.stderr)
            continue
        for stream in range(trace.num_streams):
            rows.append(
                [
                    Path(path).name,
                    trace.layer,
                    stream,
                    f"{stats.per_stream_mean[stream]:.6f}",
                    f"{stats.per_stream_variance[stream]:.6f}",
                ]
                + [f"{rho[w]:.6f}" if w in rho else "" for w in PROFILE_DEPTHS]
            )

    path = create_safe_path(out, PROFILE_NAME)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    _announce(path)
    _write_manifest(
        args,
        Subcommand.PROFILE,
        [PROFILE_NAME],
        inputs={"traces": list(args.traces)},
    )
    return 1 if failures else 0


def cmd_sweep_engine(args: argparse.Namespace) -> int:
    """OPs/cycle against sparsity for a family of MAC counts."""
    out = ensure_directory(args.out)
    size = args.kx * args.ky
    ks = args.k if args.k else list(range(1, size + 1))
    for k in ks:
        if not 1 <= k <= size:
            raise ConfigError(f"k={k} outside [1, {size}]")
    rows = sweep_engine(
        args.kx,
        args.ky,
        ks,
        sparsity_grid(args.step),
        length=args.length,
        seed=args.seed,
    )
    path = write_sweep_csv(rows, create_safe_path(out, SWEEP_ENGINE_NAME))
    _announce(path)
    _write_manifest(
        args,
        Subcommand.SWEEP_ENGINE,
        [SWEEP_ENGINE_NAME],
        options={
            "kx": args.kx,
            "ky": args.ky,
            "k": ks,
            "step": args.step,
            "length": args.length,
        },
    )
    return 0


def cmd_sweep_buffer(args: argparse.Namespace) -> int:
    """Overhead, LUTRAM and rho_w of one layer over a range of buffer depths."""
    out = ensure_directory(args.out)
    net = load_network(args.network)
    layer = net.layer(args.layer) if args.layer else net.layers[0]
    config = LayerConfig(args.n_i, args.n_o, args.k)
    if args.traces:
        trace = fit_streams(load_trace(args.traces[0]), config.n_i)
    else:
        trace = generate_synthetic_trace(
            layer, config.n_i, args.length, parse_model(args.sparsity_model), args.seed
        )
    rows, correlation = simulate_buffer_sweep(
        layer, config, trace, args.depths, model=ThroughputModel(args.model)
    )
    path = write_buffer_sweep_csv(rows, create_safe_path(out, SWEEP_BUFFER_NAME))
    _announce(path)
    print(f"{layer.name}: rank correlation(rho_w, overhead) = {correlation:.3f}")
    _write_manifest(
        args,
        Subcommand.SWEEP_BUFFER,
        [SWEEP_BUFFER_NAME],
        inputs={"network": [args.network], "traces": list(args.traces or [])},
        options={
            "layer": layer.name,
            "n_i": config.n_i,
            "n_o": config.n_o,
            "k": config.k,
            "depths": sorted(set(args.depths)),
            "model": args.model,
            "sparsity_model": None if args.traces else args.sparsity_model,
            "length": args.length,
        },
    )
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    """Write one synthetic trace per layer of a network."""
    out = ensure_directory(args.out)
    net = load_network(args.network)
    model = parse_model(args.sparsity_model)
    streams = [
        args.streams if args.streams else min(layer.c_in, args.max_streams)
        for layer in net.layers
    ]
    traces = generate_network_traces(net.layers, streams, args.length, model, args.seed)
    directory = ensure_directory(create_safe_path(out, TRACE_DIR))
    names = []
    for trace in traces:
        path = save_trace(trace, create_safe_path(directory, f"{trace.layer}.sstr"))
        names.append(f"{TRACE_DIR}/{path.name}")
        _announce(path)
    _write_manifest(
        args,
        Subcommand.GENERATE,
        names,
        inputs={"network": [args.network]},
        options={
            "sparsity_model": args.sparsity_model,
            "streams": streams,
            "length": args.length,
        },
    )
    return 0


def cmd_model(args: argparse.Namespace) -> int:
    """Per-layer analytic predictions for a design."""
    out = ensure_directory(args.out)
    net = load_network(args.network)
    design = load_design(args.design)
    stats = _layer_stats(args, net)
    model = ThroughputModel(args.model)
    header = ("layer", "N_I", "N_O", "k", "theta", "latency_cycles", "dsp", "lutram")
    path = create_safe_path(out, MODEL_NAME)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for layer, config, layer_stats in zip(
            net.layers, design.configs, stats, strict=True
        ):
            estimate = layer_estimate(
                layer,
                config,
                stream_means(layer_stats, config),
                batch_size=net.batch_size,
                model=model,
                dense=args.dense,
            )
            writer.writerow(
                (
                    layer.name,
                    config.n_i,
                    config.n_o,
                    config.k,
                    f"{estimate.theta:.6f}",
                    f"{estimate.layer_latency_cycles:.1f}",
                    dsp_usage(config),
                    lutram_usage(config),
                )
            )
    _announce(path)
    _write_manifest(
        args,
        Subcommand.MODEL,
        [MODEL_NAME],
        inputs={
            "network": [args.network],
            "design": [args.design],
            "traces": list(args.traces or []),
        },
        options={"model": args.model, "dense": args.dense},
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    """Cycle simulation of every layer of a design."""
    out = ensure_directory(args.out)
    net = load_network(args.network)
    design = load_design(args.design)
    if len(design.configs) != len(net):
        raise ConfigError(
            f"Design has {len(design.configs)} layers, network has {len(net)}"
        )
    traces = _design_traces(args, net, design.configs)
    result = simulate_network(
        net,
        design.configs,
        traces,
        model=ThroughputModel(args.model),
        dense=args.dense,
    )
    path = write_report_csv(result.reports, create_safe_path(out, SIMULATION_NAME))
    _announce(path)
    print(
        f"throughput {result.throughput:.6e} images/cycle, "
        f"bottleneck {result.bottleneck.layer}"
    )
    _write_manifest(
        args,
        Subcommand.SIMULATE,
        [SIMULATION_NAME],
        inputs={
            "network": [args.network],
            "design": [args.design],
            "traces": list(args.traces or []),
        },
        options={"model": args.model, "dense": args.dense, "length": args.length},
    )
    return 0


def _optimise(
    args: argparse.Namespace, net: NetworkSpec, schedule: AnnealSchedule
) -> OptimisationResult:
    budget = load_budget(args.budget)
    model = ThroughputModel(args.model)
    if args.traces:
        return optimise_network(
            net,
            _load_traces(args.traces, net),
            budget,
            schedule,
            epsilon=args.epsilon,
            w_max=args.w_max,
            model=model,
            dense=args.dense,
        )
    return optimise_synthetic(
        net,
        parse_model(args.sparsity_model),
        budget,
        args.length,
        schedule,
        epsilon=args.epsilon,
        w_max=args.w_max,
        model=model,
        dense=args.dense,
    )


def cmd_dse(args: argparse.Namespace) -> int:
    """Allocate MACs, size buffers and simulate the resulting design."""
    out = ensure_directory(args.out)
    net = load_network(args.network)
    schedule = load_schedule(args.sa_config) if args.sa_config else AnnealSchedule()
    schedule = schedule.with_seed(args.seed)
    result = _optimise(args, net, schedule)
    model = ThroughputModel(args.model)

    save_design(result.design, create_safe_path(out, DESIGN_NAME), model, args.dense)
    write_convergence_csv(
        result.anneal.history, create_safe_path(out, CONVERGENCE_NAME)
    )
    save_network(net, create_safe_path(out, NETWORK_NAME))
    budget_path = create_safe_path(out, BUDGET_NAME)
    budget_path.write_text(
        _json_dumps(budget_to_dict(load_budget(args.budget))), encoding="utf-8"
    )
    simulation = simulate_network(
        net, result.design.configs, result.traces, model=model, dense=args.dense
    )
    write_report_csv(simulation.reports, create_safe_path(out, SIMULATION_NAME))
    frequency, source = resolve_frequency(
        args.freq_mhz, None, net, result.design.configs
    )
    report = build_report(
        net,
        result.design,
        measurements_from_reports(simulation.reports),
        frequency,
        source,
    )
    save_report_csv(report, create_safe_path(out, REPORT_NAME))

    print(
        f"objective {result.design.objective:.6e} images/cycle "
        f"(greedy {result.anneal.greedy.objective:.6e}), "
        f"dsp {result.design.dsp_total}, lutram {result.design.lutram_total}, "
        f"simulated {simulation.throughput:.6e} images/cycle"
    )
    if report.network.gops is not None:
        print(
            f"{report.network.gops:.2f} GOP/s at {report.frequency_mhz:g} MHz "
            f"({report.frequency_source})"
        )
    outputs = [
        DESIGN_NAME,
        CONVERGENCE_NAME,
        SIMULATION_NAME,
        REPORT_NAME,
        NETWORK_NAME,
        BUDGET_NAME,
    ]
    for name in outputs:
        _announce(create_safe_path(out, name))
    _write_manifest(
        args,
        Subcommand.DSE,
        outputs,
        inputs={
            "network": [args.network],
            "budget": [args.budget],
            "traces": list(args.traces or []),
            "sa_config": [args.sa_config] if args.sa_config else [],
        },
        options={
            "model": args.model,
            "dense": args.dense,
            "epsilon": args.epsilon,
            "w_max": args.w_max,
            "sparsity_model": None if args.traces else args.sparsity_model,
            "length": args.length,
            "schedule": schedule.to_dict(),
            "initial_temperature": result.anneal.initial_temperature,
        },
    )
    return 0


def _json_dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_report(
    run_dir: str | Path, frequency_mhz: float | None, stream: TextIO
) -> DesignReport:
    """Print the per-layer summary of a completed design run.

    The clock is ``frequency_mhz``, else the one recorded by ``dse``, else
    the slowest tabulated engine of the design.

    Raises:
        ManifestError: If the manifest or any expected artifact is missing.
    """
    manifest = load_manifest(run_dir)
    missing = missing_files(run_dir, REPORT_ARTIFACTS)
    if missing:
        raise ManifestError(f"Run directory {run_dir} is incomplete", missing)

    net = load_network(create_safe_path(run_dir, NETWORK_NAME))
    design = load_design(create_safe_path(run_dir, DESIGN_NAME))
    measured = read_measurements(create_safe_path(run_dir, SIMULATION_NAME))
    frequency, source = resolve_frequency(
        frequency_mhz, manifest.frequency_mhz, net, design.configs
    )
    report = build_report(net, design, measured, frequency, source)
    print_report(report, design.objective, stream)
    return report


def cmd_report(args: argparse.Namespace) -> int:
    """Human-readable summary of a ``dse`` run directory."""
    write_report(args.run_dir, args.freq_mhz, sys.stdout)
    return 0
