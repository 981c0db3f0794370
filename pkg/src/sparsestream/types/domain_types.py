"""Type definitions for streaming sparse accelerator modelling.

This module defines domain-specific types used throughout the package.

Types:
    Cycles: Clock cycle counts
    Sparsity: Zero fraction of a window or stream, in [0, 1]
    Throughput: Windows per cycle of a single engine, in (0, 1]
    ImagesPerCycle: Network throughput
    DspCount: Number of MAC (DSP) units
    LutramCount: LUTRAM units used by buffers
    BufferDepth: Windows buffered per input stream
"""

from typing import Annotated

Cycles = Annotated[int, "Clock cycles"]
Sparsity = Annotated[float, "Zero fraction in [0, 1]"]
Throughput = Annotated[float, "Windows per cycle per engine"]
ImagesPerCycle = Annotated[float, "Images per cycle"]
DspCount = Annotated[int, "MAC units"]
LutramCount = Annotated[int, "LUTRAM units"]
BufferDepth = Annotated[int, "Windows buffered per input stream"]
