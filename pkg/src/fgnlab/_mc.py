"""Chunked Monte Carlo driver.

Replication ``r`` always draws from stream ``r`` and chunk boundaries depend
only on the problem size, so the output is identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def chunk_size_for(n: int, budget: int = 2**22) -> int:
    """Replications per chunk so that one chunk holds about ``budget`` floats."""
    return max(1, budget // max(1, 2 * n))


def run_chunks(func, reps: int, chunk: int, workers: int = 1, args=()):
    """Evaluate ``func(start, count, *args)`` over ``[0, reps)`` and concatenate in order."""
    starts = list(range(0, reps, chunk))
    counts = [min(chunk, reps - s) for s in starts]
    if workers <= 1 or len(starts) == 1:
        parts = [func(s, c, *args) for s, c in zip(starts, counts)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(func, s, c, *args) for s, c in zip(starts, counts)]
            parts = [f.result() for f in futs]
    return np.concatenate(parts, axis=0)
