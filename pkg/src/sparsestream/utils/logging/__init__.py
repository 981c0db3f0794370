"""Structured logging facilities for sparsestream.

This package provides a flexible logging system that supports structured logging
with both console and file output. It includes configuration management and
environment-specific defaults.

Key Components:
    LogLevel: Enum for available log levels (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    LogConfig: Configuration class for logger settings
    Environment: Enum for supported environments (development, production, ...)
    StructuredLogger: Logger supporting structured (JSON) event payloads
    setup_logging: Main function to configure and get a logger
    reconfigure_loggers: Re-apply a config to a whole logger hierarchy
    get_default_config: Get environment-specific default configuration

Basic Usage:
    >>> import logging
    >>> from sparsestream.utils.logging import setup_logging
    >>> logger = setup_logging("sparsestream.pipeline_sim")
    >>> logger.log_event(logging.INFO, "layer simulated", cycles=1024)

Environment-specific Setup:
    >>> from sparsestream.utils.logging import Environment
    >>> logger = setup_logging("sparsestream", env=Environment.CLI)

Notes:
    - The environment defaults to ``SPARSESTREAM_ENV`` or production
    - Console output goes to stderr so that reports on stdout stay clean
    - Structured data is JSON-formatted
"""

from .config import Environment, LogConfig, LogLevel, get_default_config
from .structured import StructuredLogger, reconfigure_loggers, setup_logging

__all__ = [
    "Environment",
    "LogConfig",
    "LogLevel",
    "StructuredLogger",
    "get_default_config",
    "reconfigure_loggers",
    "setup_logging",
]
