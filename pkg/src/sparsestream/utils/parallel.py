"""Thread-pool helpers honouring the ``PASS_DSE_THREADS`` cap."""

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Final, TypeVar

THREADS_VARIABLE: Final[str] = "PASS_DSE_THREADS"

_T = TypeVar("_T")
_R = TypeVar("_R")


def max_workers() -> int:
    """Number of worker threads allowed for internal parallelism.

    Returns the value of ``PASS_DSE_THREADS`` when it holds a positive
    integer, otherwise the CPU count.
    """
    value = os.environ.get(THREADS_VARIABLE, "").strip()
    if value:
        try:
            workers = int(value)
        except ValueError:
            workers = 0
        if workers > 0:
            return workers
    return os.cpu_count() or 1


def parallel_map(func: Callable[[_T], _R], items: Iterable[_T]) -> list[_R]:
    """Map ``func`` over ``items`` on a thread pool, preserving input order.

    Runs inline when only one worker is allowed or there is a single item.
    """
    work = list(items)
    workers = min(max_workers(), len(work))
    if workers <= 1:
        return [func(item) for item in work]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, work))
