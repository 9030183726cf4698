"""Order-preserving worker pool.

Results are identical for any worker count: items map one-to-one onto output
slots and no cross-item reduction happens in the pool.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def parallel_map(
    fn: Callable,
    items: Sequence,
    jobs: int = 1,
    initializer: Callable | None = None,
    initargs: Iterable = (),
) -> list:
    """Map ``fn`` over ``items`` preserving order, optionally in subprocesses."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(item) for item in items]
    ctx = multiprocessing.get_context("spawn")
    chunk = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(
        max_workers=jobs, mp_context=ctx, initializer=initializer, initargs=tuple(initargs)
    ) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
