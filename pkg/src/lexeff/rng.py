"""Deterministic counter-based random streams.

Every random draw in the toolkit is a pure function of (seed, stream label,
counter). Streams use the Philox 4x64 counter-based generator keyed by a
SHA-256 digest of the seed and label, so a draw does not depend on thread
scheduling, iteration order, or how many draws came before it, and the same
values can be produced one at a time or in vectorized blocks.
"""

from __future__ import annotations

import hashlib

import numpy as np

_WORDS_PER_BLOCK = 4  # Philox 4x64 emits four 64-bit words per counter value
_U64_RANGE = 1 << 64


def stream_key(seed: int, *label) -> int:
    """128-bit Philox key derived from a seed and stream label parts."""
    digest = hashlib.sha256()
    digest.update(str(int(seed)).encode("utf-8"))
    for part in label:
        digest.update(b"\x1f")
        digest.update(str(part).encode("utf-8"))
    return int.from_bytes(digest.digest()[:16], "big")


def raw_block(key: int, counter: int) -> np.ndarray:
    """The four raw 64-bit words of the Philox block at ``counter``."""
    return np.random.Philox(counter=counter, key=key).random_raw(_WORDS_PER_BLOCK)


def uniform_index(key: int, counter: int, n: int) -> int:
    """Exactly uniform draw from range(n), a pure function of (key, counter).

    Rejection sampling over the block's four words removes modulo bias. For
    n far below 2**64 a rejection is all but impossible; if every word of a
    block is rejected the search moves to a disjoint high-counter region so
    the result stays exact and reproducible.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n == 1:
        return 0
    limit = _U64_RANGE - (_U64_RANGE % n)
    attempt = 0
    while True:
        for word in raw_block(key, counter + (attempt << 192)):
            if int(word) < limit:
                return int(word) % n
        attempt += 1


def uniform_indices(key: int, start: int, count: int, n: int) -> np.ndarray:
    """Vectorized :func:`uniform_index` for counters start .. start+count-1.

    Bit-identical to calling ``uniform_index(key, c, n)`` once per counter,
    for any chunking of the counter range.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    if n == 1:
        return np.zeros(count, dtype=np.int64)
    raw = np.random.Philox(counter=start, key=key).random_raw(_WORDS_PER_BLOCK * count)
    raw = raw.reshape(count, _WORDS_PER_BLOCK)
    remainder = _U64_RANGE % n
    if remainder == 0:
        # n divides 2**64: the first word is always accepted, bias-free.
        return (raw[:, 0] % np.uint64(n)).astype(np.int64)
    limit = np.uint64(_U64_RANGE - remainder)
    accepted = raw < limit
    first = accepted.argmax(axis=1)
    out = (raw[np.arange(count), first] % np.uint64(n)).astype(np.int64)
    rejected_rows = ~accepted.any(axis=1)
    if rejected_rows.any():
        for i in np.nonzero(rejected_rows)[0]:
            out[i] = uniform_index(key, start + int(i), n)
    return out
