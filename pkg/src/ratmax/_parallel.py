"""Order-preserving worker pool used by the randomized drivers."""

import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "RATMAX_WORKERS"


def worker_count(workers=None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def parallel_map(fn, items, workers=None):
    """``list(map(fn, items))``, optionally spread over processes.

    Results come back in input order, so reductions over them are
    independent of the worker count.
    """
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
