"""
Worker pool helpers for grid evaluation
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    """Physical core count when psutil is present, else the logical count"""
    if PSUTIL_AVAILABLE:
        count = psutil.cpu_count(logical=False)
        if count:
            return count
    return os.cpu_count() or 1


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = 1) -> List[R]:
    """
    Apply func to every item; results come back in input order

    threads=None picks default_threads(); 1 runs inline.
    """
    items = list(items)
    n = default_threads() if threads is None else max(1, int(threads))
    if n == 1 or len(items) < 2:
        return [func(item) for item in items]
    logger.debug("mapping %d items over %d threads", len(items), n)
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
