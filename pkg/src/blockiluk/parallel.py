"""Fork-join execution of row-range chunks on a shared thread pool.

Worker counts influence only how ranges are partitioned; every chunk body
computes a pure function of rows it owns, so numeric results never depend
on the worker count. numpy kernels release the GIL, which is where the
actual concurrency comes from.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

_pools = {}
_pools_lock = threading.Lock()


def _pool(workers):
    with _pools_lock:
        pool = _pools.get(workers)
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=workers)
            _pools[workers] = pool
        return pool


def chunk_ranges(n, chunks):
    """Split range(n) into at most ``chunks`` contiguous, near-equal pieces."""
    chunks = max(1, min(int(chunks), n))
    bounds = [n * i // chunks for i in range(chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(chunks) if bounds[i + 1] > bounds[i]]


def run_chunks(body, n, workers):
    """Run ``body(lo, hi)`` over a contiguous partition of range(n).

    With ``workers <= 1`` the body runs inline on the single range (0, n).
    Otherwise the ranges are submitted to a shared pool and this call
    returns only after every chunk finished, giving a fork-join barrier.
    Bodies must write disjoint outputs and read only data that no chunk
    of the same batch writes.
    """
    if n <= 0:
        return
    if workers <= 1 or n == 1:
        body(0, n)
        return
    ranges = chunk_ranges(n, workers)
    if len(ranges) == 1:
        body(0, n)
        return
    pool = _pool(workers)
    futures = [pool.submit(body, lo, hi) for lo, hi in ranges]
    for fut in futures:
        fut.result()
