"""Structured logger implementation and setup functions.

Provides the actual logger implementation and setup functionality, using
the configuration classes defined in config.py.
"""

import json
import logging
import sys
from typing import Any, cast

from .config import Environment, LogConfig, get_default_config


class StructuredLogger(logging.Logger):
    """Logger that supports structured logging."""

    def log_event(self, level: int, msg: str, **data: Any) -> None:
        """Log a message together with a JSON payload of structured data.

        Args:
            level: Numeric logging level.
            msg: Human-readable event name.
            **data: JSON-serialisable key/value pairs attached to the event.
        """
        if not self.isEnabledFor(level):
            return
        log_entry = {"message": msg, "data": data}
        super().log(level, json.dumps(log_entry, default=str, sort_keys=True))


def setup_logging(
    name: str | None = None,
    config: LogConfig | None = None,
    env: str | Environment | None = None,
) -> StructuredLogger:
    """Configure and return a logger with given configuration.

    Args:
        name: Logger name. If None, returns the package root logger
        config: Logging configuration. If None, uses env-specific default
        env: Environment to use for default config. Can be string or Environment enum

    Returns:
        Configured logger instance

    Example:
        >>> logger = setup_logging("sparsestream.trace", env="development")
        >>> logger.log_event(logging.INFO, "trace loaded", streams=32)
    """
    if env is None:
        env = Environment.default()
    elif isinstance(env, str):
        env = Environment.from_string(env)

    local_config: LogConfig
    if config is None:
        try:
            local_config = get_default_config(env)
        except ValueError:
            local_config = get_default_config(Environment.default())
    else:
        local_config = config

    logging.setLoggerClass(StructuredLogger)
    logger = logging.getLogger(name or "sparsestream")
    if not isinstance(logger, StructuredLogger):
        # Created before our logger class was registered
        logger.__class__ = StructuredLogger

    logger.handlers.clear()

    formatter = logging.Formatter(
        fmt=local_config.format, datefmt=local_config.date_format
    )

    if local_config.console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_level = local_config.console_level or local_config.level
        console_handler.setLevel(console_level.to_level())
        logger.addHandler(console_handler)

    if local_config.file_output:
        log_file = local_config.get_log_file_path()
        if log_file is not None:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(formatter)
            file_handler.setLevel(local_config.level.to_level())
            logger.addHandler(file_handler)

    logger.setLevel(local_config.level.to_level())
    logger.propagate = local_config.propagate

    if local_config.capture_warnings:
        logging.captureWarnings(True)

    return cast(StructuredLogger, logger)


def reconfigure_loggers(prefix: str, config: LogConfig) -> list[StructuredLogger]:
    """Apply ``config`` to every existing logger named ``prefix`` or below it.

    Module loggers are created at import time with the default config; the
    command line calls this once its own config is known.
    """
    names = [
        name
        for name in list(logging.Logger.manager.loggerDict)
        if name == prefix or name.startswith(f"{prefix}.")
    ]
    if prefix not in names:
        names.insert(0, prefix)
    return [setup_logging(name, config) for name in sorted(names)]
