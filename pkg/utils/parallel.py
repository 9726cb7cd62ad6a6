# utils/parallel.py

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from config import require_thread_cap

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(
    fn: Callable[[T], R],
    items: Sequence[T],
    threads: Optional[int] = None,
    progress: bool = False,
    desc: Optional[str] = None,
) -> List[R]:
    """
    Applies ``fn`` to every item on a thread pool and returns the results in input
    order, whatever order they complete in. ``threads`` overrides CFC_LAB_THREADS.
    """
    workers = min(threads or require_thread_cap(), max(len(items), 1))
    logger.debug("mapping %d item(s) on %d thread(s)", len(items), workers)
    if workers == 1:
        return [fn(item) for item in tqdm(items, desc=desc, disable=not progress)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(fn, items), total=len(items), desc=desc, disable=not progress))
