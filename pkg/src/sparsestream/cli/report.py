"""Per-layer performance report of a design run.

Joins the analytic design with the simulated cycle counts of every layer and,
when a clock frequency is known, converts the simulated throughput into GOP/s
and GOP/s per DSP. Layers with a 3x3 kernel and an engine size listed in
``SYNTHESIS_TABLE`` also get the LUT and FF of their engines; if no frequency
is given the slowest of those engines sets the clock.

The report is printed by ``sparsestream report`` and written as
``report.csv`` by ``sparsestream dse``, one row per layer followed by a
``network`` row.
"""

import csv
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Final, NamedTuple, TextIO

from sparsestream.analytic import LayerConfig, dsp_usage, lutram_usage
from sparsestream.const import OPS_PER_MAC, SYNTHESIS_TABLE, SynthesisPoint
from sparsestream.dse import DesignPoint
from sparsestream.netspec import LayerSpec, NetworkSpec, layer_workload
from sparsestream.pipeline_sim import SimReport
from sparsestream.types import ConfigError, ManifestError

REPORT_NAME: Final[str] = "report.csv"
NETWORK_ROW: Final[str] = "network"
SYNTHESISED_KERNEL: Final[tuple[int, int]] = (3, 3)
REPORT_COLUMNS: Final[tuple[str, ...]] = (
    "layer",
    "shape",
    "N_I",
    "N_O",
    "k",
    "w",
    "theta",
    "model_cycles",
    "measured_cycles",
    "overhead_pct",
    "dsp",
    "lutram",
    "engine_lut",
    "engine_ff",
    "gops",
    "gops_per_dsp",
)


class FrequencySource(str, Enum):
    """Where the clock frequency of a report came from."""

    OPTION = "option"
    MANIFEST = "manifest"
    SYNTHESIS = "synthesis"

    def __str__(self) -> str:
        """Return the label printed next to the frequency."""
        return self.value


class LayerMeasurement(NamedTuple):
    """Simulated and modelled cycles of one layer."""

    measured_cycles: int
    model_cycles: int


@dataclass(frozen=True)
class ReportRow:
    """One line of the report; ``None`` cells are written empty.

    ``engine_lut`` and ``engine_ff`` add up every engine of the layer.
    """

    layer: str
    shape: str
    n_i: int | None
    n_o: int | None
    k: int | None
    w: int | None
    theta: float | None
    model_cycles: int
    measured_cycles: int
    dsp: int
    lutram: int
    engine_lut: int | None
    engine_ff: int | None
    gops: float | None

    @property
    def overhead_pct(self) -> float:
        """Measured cycles over modelled cycles, minus one, in percent."""
        return 100.0 * (self.measured_cycles / self.model_cycles - 1.0)

    @property
    def gops_per_dsp(self) -> float | None:
        """GOP/s divided by the DSPs spent on the layer."""
        if self.gops is None or self.dsp == 0:
            return None
        return self.gops / self.dsp

    def row(self) -> tuple[str | int, ...]:
        """CSV row matching ``REPORT_COLUMNS``."""
        return (
            self.layer,
            self.shape,
            _cell(self.n_i),
            _cell(self.n_o),
            _cell(self.k),
            _cell(self.w),
            "" if self.theta is None else f"{self.theta:.6f}",
            self.model_cycles,
            self.measured_cycles,
            f"{self.overhead_pct:.4f}",
            self.dsp,
            self.lutram,
            _cell(self.engine_lut),
            _cell(self.engine_ff),
            "" if self.gops is None else f"{self.gops:.4f}",
            "" if self.gops_per_dsp is None else f"{self.gops_per_dsp:.6f}",
        )


@dataclass(frozen=True)
class DesignReport:
    """Per-layer rows, the network total and the clock they assume."""

    layers: tuple[ReportRow, ...]
    network: ReportRow
    images_per_cycle: float
    frequency_mhz: float | None
    frequency_source: FrequencySource | None

    @property
    def rows(self) -> tuple[ReportRow, ...]:
        """Layer rows followed by the network row."""
        return (*self.layers, self.network)


def _cell(value: int | None) -> str | int:
    return "" if value is None else value


def layer_shape(layer: LayerSpec) -> str:
    """``C_inxC_outxH_outxW_out/K_xxK_y``."""
    return (
        f"{layer.c_in}x{layer.c_out}x{layer.h_out}x{layer.w_out}"
        f"/{layer.k_x}x{layer.k_y}"
    )


def engine_synthesis(layer: LayerSpec, config: LayerConfig) -> SynthesisPoint | None:
    """Synthesis figures of one engine of ``layer``, when they are tabulated."""
    if (layer.k_x, layer.k_y) != SYNTHESISED_KERNEL:
        return None
    return SYNTHESIS_TABLE.get(config.k)


def synthesis_frequency(
    net: NetworkSpec, configs: Sequence[LayerConfig]
) -> float | None:
    """Clock of the slowest engine, or None unless every layer is tabulated."""
    clocks = []
    for layer, config in zip(net.layers, configs, strict=True):
        point = engine_synthesis(layer, config)
        if point is None:
            return None
        clocks.append(point.freq_mhz)
    return min(clocks) if clocks else None


def resolve_frequency(
    option: float | None,
    recorded: float | None,
    net: NetworkSpec,
    configs: Sequence[LayerConfig],
) -> tuple[float | None, FrequencySource | None]:
    """Pick the report clock: option, then manifest, then synthesis table.

    Raises:
        ConfigError: If the explicit frequency is not positive.
    """
    if option is not None:
        if not option > 0.0:
            raise ConfigError(f"Frequency must be > 0 MHz, got {option}")
        return option, FrequencySource.OPTION
    if recorded is not None:
        return recorded, FrequencySource.MANIFEST
    synthesised = synthesis_frequency(net, configs)
    if synthesised is not None:
        return synthesised, FrequencySource.SYNTHESIS
    return None, None


def layer_gops(
    layer: LayerSpec, images_per_cycle: float, frequency_mhz: float
) -> float:
    """GOP/s of one layer at ``frequency_mhz``, counting a MAC as two operations."""
    images_per_second = images_per_cycle * frequency_mhz * 1e6
    return OPS_PER_MAC * layer_workload(layer) * images_per_second * 1e-9


def gops(net: NetworkSpec, images_per_cycle: float, frequency_mhz: float) -> float:
    """GOP/s of the whole network at ``frequency_mhz``."""
    return sum(
        layer_gops(layer, images_per_cycle, frequency_mhz) for layer in net.layers
    )


def measurements_from_reports(
    reports: Iterable[SimReport],
) -> dict[str, LayerMeasurement]:
    """Measurements keyed by layer name from in-memory simulation results."""
    return {
        report.layer: LayerMeasurement(report.measured_cycles, report.model_cycles)
        for report in reports
    }


def read_measurements(path: str | Path) -> dict[str, LayerMeasurement]:
    """Measurements keyed by layer name from a ``simulation.csv`` file."""
    with Path(path).open(newline="", encoding="utf-8") as f:
        return {
            row["layer"]: LayerMeasurement(
                int(row["measured_cycles"]), int(row["model_cycles"])
            )
            for row in csv.DictReader(f)
        }


def build_report(
    net: NetworkSpec,
    design: DesignPoint,
    measured: Mapping[str, LayerMeasurement],
    frequency_mhz: float | None = None,
    frequency_source: FrequencySource | None = None,
) -> DesignReport:
    """Combine a design and its simulation into report rows.

    Raises:
        ManifestError: If a layer has no simulated measurement.
    """
    missing = [layer.name for layer in net.layers if layer.name not in measured]
    if missing:
        raise ManifestError("Simulation has no row for layer", missing)

    slowest = max(measured[layer.name].measured_cycles for layer in net.layers)
    images_per_cycle = net.batch_size / slowest

    thetas: Sequence[float | None] = design.thetas or [None] * len(design.configs)
    rows = []
    for layer, config, theta in zip(net.layers, design.configs, thetas, strict=True):
        point = engine_synthesis(layer, config)
        engines = config.n_i * config.n_o
        cycles = measured[layer.name]
        rows.append(
            ReportRow(
                layer=layer.name,
                shape=layer_shape(layer),
                n_i=config.n_i,
                n_o=config.n_o,
                k=config.k,
                w=config.buffer_depth,
                theta=theta,
                model_cycles=cycles.model_cycles,
                measured_cycles=cycles.measured_cycles,
                dsp=dsp_usage(config),
                lutram=lutram_usage(config),
                engine_lut=None if point is None else engines * point.lut,
                engine_ff=None if point is None else engines * point.ff,
                gops=(
                    None
                    if frequency_mhz is None
                    else layer_gops(layer, images_per_cycle, frequency_mhz)
                ),
            )
        )

    luts = [row.engine_lut for row in rows]
    ffs = [row.engine_ff for row in rows]
    network = ReportRow(
        layer=NETWORK_ROW,
        shape="",
        n_i=None,
        n_o=None,
        k=None,
        w=None,
        theta=None,
        model_cycles=max(row.model_cycles for row in rows),
        measured_cycles=slowest,
        dsp=design.dsp_total,
        lutram=design.lutram_total,
        engine_lut=None if None in luts else sum(v for v in luts if v is not None),
        engine_ff=None if None in ffs else sum(v for v in ffs if v is not None),
        gops=(
            None
            if frequency_mhz is None
            else gops(net, images_per_cycle, frequency_mhz)
        ),
    )
    return DesignReport(
        layers=tuple(rows),
        network=network,
        images_per_cycle=images_per_cycle,
        frequency_mhz=frequency_mhz,
        frequency_source=frequency_source if frequency_mhz is not None else None,
    )


def save_report_csv(report: DesignReport, path: str | Path) -> Path:
    """Write ``REPORT_COLUMNS`` with one row per layer and a network row."""
    file_path = Path(path)
    with file_path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(row.row() for row in report.rows)
    return file_path


def _fmt(value: float | int | None, spec: str) -> str:
    return "-" if value is None else format(value, spec)


def print_report(report: DesignReport, objective: float, stream: TextIO) -> None:
    """Print the report as a fixed-width table with a summary."""
    print(
        f"{'layer':<14}{'shape':>22}{'N_I':>6}{'N_O':>6}{'k':>4}{'w':>5}"
        f"{'theta':>8}{'t_model':>12}{'measured':>12}{'overhead%':>11}"
        f"{'dsp':>7}{'LUT':>9}{'GOP/s':>10}{'GOP/s/DSP':>11}",
        file=stream,
    )
    for row in report.rows:
        print(
            f"{row.layer:<14}{row.shape:>22}{_fmt(row.n_i, 'd'):>6}"
            f"{_fmt(row.n_o, 'd'):>6}{_fmt(row.k, 'd'):>4}{_fmt(row.w, 'd'):>5}"
            f"{_fmt(row.theta, '.3f'):>8}{row.model_cycles:>12}"
            f"{row.measured_cycles:>12}{row.overhead_pct:>11.2f}{row.dsp:>7}"
            f"{_fmt(row.engine_lut, 'd'):>9}{_fmt(row.gops, '.2f'):>10}"
            f"{_fmt(row.gops_per_dsp, '.4f'):>11}",
            file=stream,
        )

    network = report.network
    print(
        f"objective {objective:.6e} images/cycle (model), "
        f"{report.images_per_cycle:.6e} images/cycle (simulated), "
        f"dsp {network.dsp}, lutram {network.lutram}",
        file=stream,
    )
    if report.frequency_mhz is not None and network.gops is not None:
        print(
            f"{network.gops:.2f} GOP/s at {report.frequency_mhz:g} MHz "
            f"({report.frequency_source}), "
            f"{_fmt(network.gops_per_dsp, '.4f')} GOP/s/DSP",
            file=stream,
        )
