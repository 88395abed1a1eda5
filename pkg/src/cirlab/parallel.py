"""Block-parallel Monte Carlo.

Paths are cut into fixed-size blocks that never depend on the worker
count, every path draws from its own stream, and blocks are reassembled
by index.  Results are therefore identical for any number of workers.
"""
from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor

import numpy as np

BLOCK_SIZE = 2048


def _blocks(total, block_size):
    return [(s, min(s + block_size, total)) for s in range(0, total, block_size)]


def _call(args):
    fn, start, stop = args
    return fn(start, stop)


def map_blocks(fn, total: int, workers: int = 1, block_size: int = BLOCK_SIZE):
    """Evaluate ``fn(start, stop)`` over consecutive blocks and concatenate along axis 0.

    ``fn`` must be picklable (a module-level function or a partial of one)
    when ``workers > 1``.  It may return an array or a tuple of arrays.
    """
    blocks = _blocks(total, block_size)
    if workers <= 1 or len(blocks) == 1:
        parts = [fn(s, e) for s, e in blocks]
    else:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            parts = list(pool.map(_call, [(fn, s, e) for s, e in blocks]))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p) for p in zip(*parts))
    return np.concatenate(parts)
