"""Counter-based random draws: sample ``k`` under ``seed`` is a fixed function of (seed, k).

Each sample owns one Philox block of four 64-bit words, addressed by setting the
generator's counter to ``k``. A contiguous range of samples is therefore one
``random_raw`` call, and any partition of the index range into blocks yields the
same numbers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np
from scipy.special import ndtri

WORDS_PER_SAMPLE = 4
BLOCK_SIZE = 1 << 16
_SCALE = 2.0**-53

T = TypeVar("T")


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """``(count, 4)`` open-interval uniforms for samples ``start .. start+count-1``."""
    gen = np.random.Philox(key=check_seed(seed), counter=int(start))
    words = gen.random_raw(WORDS_PER_SAMPLE * int(count)).reshape(count, WORDS_PER_SAMPLE)
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE


def normals(seed: int, start: int, count: int) -> np.ndarray:
    """Standard normals by inverse CDF of :func:`uniforms`."""
    return ndtri(uniforms(seed, start, count))


def blocks(n_samples: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    """Fixed ``(start, count)`` partition of ``range(n_samples)``."""
    return [(s, min(block_size, n_samples - s)) for s in range(0, n_samples, block_size)]


def map_blocks(fn: Callable[[int, int], T], n_samples: int, workers: int = 1,
               block_size: int = BLOCK_SIZE) -> list[T]:
    """Apply ``fn(start, count)`` to every block, returning results in block order.

    The partition does not depend on ``workers``, so neither do the results.
    """
    parts = blocks(n_samples, block_size)
    if workers <= 1 or len(parts) <= 1:
        return [fn(s, c) for s, c in parts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda sc: fn(*sc), parts))
