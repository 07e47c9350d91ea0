"""Fixed-size bitsets over instance ids, stored as uint64 word arrays.

Packing is arithmetic (bit i of word j = row 64*j + i) so the layout does not
depend on platform endianness. Padding bits past n are always zero.
"""

from __future__ import annotations

import numpy as np

from . import kernels

_POW2 = np.uint64(1) << np.arange(64, dtype=np.uint64)


def n_words(n: int) -> int:
    return (n + 63) // 64


def pack_bool(mask: np.ndarray) -> np.ndarray:
    """Pack a boolean vector into uint64 words."""
    n = mask.shape[0]
    w = n_words(n)
    padded = np.zeros(w * 64, dtype=np.uint64)
    padded[:n] = mask.astype(np.uint64)
    return (padded.reshape(w, 64) * _POW2).sum(axis=1, dtype=np.uint64)


def ones(n: int) -> np.ndarray:
    """All-rows bitset with zeroed padding."""
    return pack_bool(np.ones(n, dtype=bool))


def zeros(n: int) -> np.ndarray:
    return np.zeros(n_words(n), dtype=np.uint64)


def to_bool(words: np.ndarray, n: int) -> np.ndarray:
    bits = (words[:, None] >> np.arange(64, dtype=np.uint64)[None, :]) & np.uint64(1)
    return bits.reshape(-1)[:n].astype(bool)


def to_indices(words: np.ndarray, n: int) -> np.ndarray:
    return np.flatnonzero(to_bool(words, n))


def popcount(words: np.ndarray) -> int:
    return kernels.popcount(words)
