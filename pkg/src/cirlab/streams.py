"""Counter-based random streams.

Every Monte Carlo path owns a Philox stream keyed by the master seed and
positioned by its stream id in the counter, so a path's draws depend only
on ``(master_seed, stream_id)`` and never on the order in which paths are
simulated or on how many workers share the job.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SEED_ENV = "CIRLAB_SEED"
DEFAULT_SEED = 20160303
_MASK64 = (1 << 64) - 1


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else DEFAULT_SEED


@lru_cache(maxsize=256)
def _key(master_seed: int) -> tuple[int, int]:
    k = np.random.SeedSequence(master_seed & _MASK64).generate_state(2, np.uint64)
    return int(k[0]), int(k[1])


def subseed(master_seed: int, *labels: int) -> int:
    """Derive a 64-bit master seed for one experiment cell."""
    words = [master_seed & _MASK64] + [int(v) & _MASK64 for v in labels]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Rng:
    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        # high counter words carry the stream id; the low words count draws
        counter = [0, 0, self.stream_id & _MASK64, 0]
        return np.random.Generator(np.random.Philox(key=list(_key(self.master_seed)), counter=counter))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, Rng):
        return rng.generator()
    return Rng(int(rng)).generator()


def stream_generators(master_seed: int, start: int, stop: int):
    for sid in range(start, stop):
        yield Rng(master_seed, sid).generator()
