# declab/core/parallel.py
# Thread-pool helper for independent jobs (experiment lists, R suites, grid chunks).

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from declab.core.config import THREADS

logger = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")


def map_jobs(fn: Callable[[T], U], jobs: Iterable[T], threads: int | None = None) -> list[U]:
    """
    Run `fn` over `jobs` and return results in input order.
    Runs inline when one thread is requested, so tests stay deterministic and easy to debug.
    """
    jobs = list(jobs)
    workers = min(threads or THREADS, max(1, len(jobs)))
    if workers <= 1:
        return [fn(job) for job in jobs]

    logger.debug("🧵 Running %d jobs on %d threads", len(jobs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))
