"""Counter-based random substreams and chunked parallel execution.

Samples are split into fixed-size chunks by index.  Chunk ``c`` of a run with
seed ``s`` draws from Philox keyed by ``(c, s)``, with a per-purpose tag in
the high counter word, so the numbers a sample sees depend only on
``(seed, purpose, sample index)`` and never on how many workers ran.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

from .errors import DomainError

CHUNK = 1 << 16
SEED_MASK = (1 << 64) - 1

# purpose tags
UNIFORM = 1
GAMMA = 2
LOW_BITS = 3
GAUSS = 4

T = TypeVar("T")


def chunk_rng(seed: int, chunk: int, purpose: int) -> np.random.Generator:
    key = ((chunk & SEED_MASK) << 64) | (seed & SEED_MASK)
    counter = np.array([0, 0, 0, purpose], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def chunks(total: int, size: int = CHUNK) -> List[Tuple[int, int, int]]:
    """(chunk index, start, stop) covering range(total)."""
    return [(c, s, min(s + size, total)) for c, s in enumerate(range(0, total, size))]


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else $WILTON_LAB_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("WILTON_LAB_THREADS", "").strip()
        if not env:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise DomainError(f"WILTON_LAB_THREADS must be an integer, got {env!r}") from None
    if threads < 1:
        raise DomainError("threads must be >= 1")
    return threads


def run_ordered(fn: Callable[..., T], items: Sequence, threads: int = 1) -> List[T]:
    """map fn over items, results in input order whatever the thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def random_bits64(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, SEED_MASK, size=n, dtype=np.uint64, endpoint=True)


def floats_to_dyadic64(x: np.ndarray, low: np.ndarray) -> np.ndarray:
    """bits of a 64-bit dyadic sample at each float x in [0, 1).

    The 53-bit mantissa of x fixes the leading bits; whatever lies below
    the float's resolution (when x > 2^-11) is filled from ``low``, so the
    samples carry full 64-bit expansions rather than sitting on the float
    grid.  Zero maps to the smallest positive sample.
    """
    x = np.asarray(x, dtype=np.float64)
    m, e = np.frexp(x)  # x = m 2^e, m in [0.5, 1)
    shift = e.astype(np.int64) + 11  # x 2^64 = (m 2^53) 2^(e+11)
    pos = (shift > 0) & (x > 0)
    sh = np.where(pos, shift, 0).astype(np.uint64)
    top = np.floor(m * 2.0 ** 53).astype(np.uint64)
    fill = low & ((np.uint64(1) << sh) - np.uint64(1))
    bits_hi = (top << sh) | fill
    bits_lo = np.floor(x * 2.0 ** 64).astype(np.uint64)
    bits = np.where(pos, bits_hi, bits_lo)
    bits[bits == 0] = 1
    return bits


def dyadic64_to_float(bits: np.ndarray) -> np.ndarray:
    return bits.astype(np.float64) * 2.0 ** -64
