"""Deterministic helpers for optional multi-process execution.

The worker count comes from the ``QSCI_WORKERS`` environment variable
(default 1).  Work is always split into fixed-size blocks whose results
are merged in block order, so the arithmetic is identical for any
worker count; workers only change the scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

WORKERS_ENV = "QSCI_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
    return n


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving order; uses a process pool when QSCI_WORKERS > 1.

    ``fn`` and the items must be picklable when more than one worker is
    requested.  Results are returned in input order regardless of
    scheduling.
    """
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, (len(items) + workers - 1) // workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def fixed_blocks(n: int, block: int) -> Iterable[range]:
    """Split range(n) into blocks of a size independent of worker count."""
    for start in range(0, n, block):
        yield range(start, min(start + block, n))
