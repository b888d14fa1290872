"""Seeded, partitioned Monte Carlo execution.

Work of ``total`` items is cut into fixed-size chunks.  Chunk ``k`` of the
experiment stream ``stream`` draws from
``SeedSequence(master_seed, spawn_key=(stream, k))``, so results depend on
the master seed and chunk size only, never on the worker count.
"""
from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

import numpy as np

CHUNK_SIZE = 1 << 16
PARTITION_RULE = ("chunks of {chunk_size} items; chunk k of stream s seeded by "
                  "numpy SeedSequence(master_seed, spawn_key=(s, k)) with PCG64")

T = TypeVar("T")


def stream_id(name: str) -> int:
    """Stable integer id for a named experiment stream."""
    return zlib.crc32(name.encode())


def chunk_rng(master_seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(master_seed, spawn_key=(stream, chunk))))


def chunk_sizes(total: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    if total < 0:
        raise ValueError("total must be non-negative")
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunk(args):
    fn, count, master_seed, stream, k = args
    return fn(count, chunk_rng(master_seed, stream, k))


def run_chunked(fn: Callable[[int, np.random.Generator], T], total: int, master_seed: int,
                stream: int = 0, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> list[T]:
    """Evaluate ``fn(count, rng)`` per chunk; results come back in chunk order.

    With ``workers > 1`` ``fn`` must be picklable (module-level or a partial).
    """
    jobs = [(fn, count, master_seed, stream, k)
            for k, count in enumerate(chunk_sizes(total, chunk_size))]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_chunk(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, jobs))


def map_seeded(fn: Callable[..., T], items: list, master_seed: int, stream: int = 0,
               workers: int = 1) -> list[T]:
    """``fn(item, rng)`` for each item, item ``k`` using chunk stream ``k``."""
    jobs = [(_ItemCall(fn, item), 0, master_seed, stream, k) for k, item in enumerate(items)]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_chunk(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, jobs))


class _ItemCall:
    def __init__(self, fn, item):
        self.fn = fn
        self.item = item

    def __call__(self, _count, rng):
        return self.fn(self.item, rng)
