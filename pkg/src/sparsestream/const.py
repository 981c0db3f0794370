"""Constants used across the sparsestream toolflow.

Constants:
    TRACE_MAGIC / TRACE_VERSION: Header of the binary trace container.
    LUTRAM_*: Buffer memory staircase (units per 32 streams).
    DEFAULT_*: Defaults for annealing, buffer sizing and sweeps.
    SYNTHESIS_TABLE: Published per-k synthesis figures for a 3x3 engine.
"""

from typing import Final, NamedTuple

# Binary trace container
TRACE_MAGIC: Final[bytes] = b"SSTR"
TRACE_VERSION: Final[int] = 1
TRACE_SUFFIX: Final[str] = ".sstr"
CSV_SUFFIX: Final[str] = ".csv"

# LUTRAM staircase: fixed handshake cost plus one step per 32 windows of depth
LUTRAM_STREAM_GROUP: Final[int] = 32
LUTRAM_STEP: Final[int] = 288
LUTRAM_DEPTH_STEP: Final[int] = 32

# Simulated annealing
DEFAULT_COOLING_RATE: Final[float] = 0.97
DEFAULT_ITERATIONS_PER_TEMPERATURE: Final[int] = 100
DEFAULT_MIN_TEMPERATURE_RATIO: Final[float] = 1e-4
DEFAULT_UPHILL_ACCEPTANCE: Final[float] = 0.8
DEFAULT_CALIBRATION_MOVES: Final[int] = 100
DEFAULT_INITIAL_TEMPERATURE: Final[float] = 0.1

# Buffer sizing
DEFAULT_EPSILON: Final[float] = 0.05
DEFAULT_W_MAX: Final[int] = 256
RHO_GUARD: Final[float] = 1e-6
MIN_BUFFER_DEPTH: Final[int] = 2

# Sweeps and reports
PROFILE_DEPTHS: Final[tuple[int, ...]] = (2, 4, 8, 16, 32, 64, 128, 256)
SWEEP_SPARSITY_STEP: Final[float] = 0.05
DEFAULT_SWEEP_LENGTH: Final[int] = 100_000
# Windows per stream simulated cycle by cycle; longer layers are extrapolated
SIMULATION_WINDOW_LIMIT: Final[int] = 1 << 16
OPS_PER_MAC: Final[int] = 2


class SynthesisPoint(NamedTuple):
    """LUT, FF and clock frequency of one synthesised 3x3 engine."""

    lut: int
    ff: int
    freq_mhz: float


# Reporting only: values are looked up, never modelled.
SYNTHESIS_TABLE: Final[dict[int, SynthesisPoint]] = {
    1: SynthesisPoint(409, 686, 336.6),
    2: SynthesisPoint(550, 686, 249.9),
    3: SynthesisPoint(688, 752, 237.0),
    4: SynthesisPoint(802, 752, 210.9),
    5: SynthesisPoint(855, 848, 190.7),
    6: SynthesisPoint(869, 880, 221.7),
    7: SynthesisPoint(857, 880, 224.4),
    8: SynthesisPoint(894, 880, 235.7),
}
