"""Optional thread-pool mapping, capped by MTRD_THREADS.

Work items must be independently seeded pure calls; results are collected
in input order, so parallel and sequential runs aggregate identically.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("MTRD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """map() in input order, threaded when MTRD_THREADS > 1."""
    items = list(items)
    n = thread_cap()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
