"""Configuration facilities for the sparsestream package.

Provides project-specific logging configuration on top of the generic
defaults in :mod:`sparsestream.utils.logging`.
"""

from pathlib import Path

from .utils.logging import Environment, LogConfig, get_default_config
from .utils.safepath import create_safe_path


def get_sparsestream_log_config(
    env: str | Environment | None = None, log_dir: str | Path | None = None
) -> LogConfig:
    """Get sparsestream-specific logging configuration.

    Builds on the generic defaults and enables a log file when ``log_dir`` is
    given. The file is named after the environment.
    """
    config = get_default_config(env)
    env_name = Environment.default().value if env is None else str(
        env.value if isinstance(env, Environment) else env
    )

    if log_dir is not None:
        config.file_output = True
        config.log_dir = create_safe_path(log_dir)
        config.file_name = f"sparsestream-{env_name.lower()}.log"

    return config
