"""Project-independent helpers used across sparsestream.

Components:
    logging: Structured logging with environment-aware configuration
    safepath: Safe path handling for run directories and artifacts
    parallel: Thread-pool sizing from ``PASS_DSE_THREADS``
"""

try:
    from sparsestream._version import version as __version__
except ImportError:
    __version__ = "unknown"
