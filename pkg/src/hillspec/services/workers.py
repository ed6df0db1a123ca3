"""Ordered worker pool shared by the parallel computations."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from ..config import default_workers

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        return default_workers()
    return max(1, int(workers))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> List[R]:
    """Apply ``fn`` to every item; results come back in submission order.

    ``workers <= 1`` runs inline. Reductions are left to the caller so that
    results do not depend on the pool size.
    """

    jobs = list(items)
    size = min(resolve_workers(workers), max(len(jobs), 1))
    if size <= 1:
        return [fn(item) for item in jobs]
    logger.debug("Dispatching %d jobs to %d workers", len(jobs), size)
    with ThreadPoolExecutor(max_workers=size) as pool:
        return list(pool.map(fn, jobs))
