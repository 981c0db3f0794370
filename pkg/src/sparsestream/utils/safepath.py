"""Safe path helpers for run directories and the artifacts inside them."""

from collections.abc import Iterable
from pathlib import Path


def create_safe_path(
    base_path: str | Path,
    *path_parts: str,
    exist_ok: bool = True,
) -> Path:
    """Create a safe, absolute path by joining path components.

    Args:
        base_path: The root directory path to start from.
        *path_parts: Variable number of path segments to join.
        exist_ok: If True, don't raise error if path exists.

    Returns:
        A resolved Path object representing the full path.

    Raises:
        ValueError: If the resulting path would be outside base_path.
        FileExistsError: If path exists and exist_ok is False.
    """
    base_path = Path(base_path).resolve()
    full_path = base_path.joinpath(*path_parts).resolve()

    try:
        full_path.relative_to(base_path)
    except ValueError as e:
        raise ValueError(
            f"Resulting path '{full_path}' is outside base path '{base_path}'"
        ) from e

    if full_path.exists() and not exist_ok:
        raise FileExistsError(f"Path already exists: {full_path}")

    return full_path


def ensure_directory(path: str | Path) -> Path:
    """Resolve ``path`` and create it (with parents) if it does not exist.

    Raises:
        NotADirectoryError: If ``path`` exists but is not a directory.
    """
    directory = Path(path).resolve()
    if directory.exists() and not directory.is_dir():
        raise NotADirectoryError(f"Not a directory: {directory}")
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def missing_files(directory: str | Path, names: Iterable[str]) -> list[str]:
    """Return the entries of ``names`` that are not regular files in ``directory``."""
    base = Path(directory)
    return [name for name in names if not create_safe_path(base, name).is_file()]
