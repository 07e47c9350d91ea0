"""Counter-based pseudo-random primitives (splitmix64).

Shared by the compiled and numpy kernel backends so both grow bit-identical
trees from the same seed. Kept deliberately independent of numpy's Generator:
the stream must be reproducible from plain integer arithmetic in C.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SALT = 0xA5A5A5A5A5A5A5A5


def mix64(z: int) -> int:
    """splitmix64 output function."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_seed(a: int, b: int = 0, c: int = 0) -> int:
    """Derive an independent stream seed from up to three integer coordinates."""
    s = mix64((a & MASK64) ^ _SALT)
    s = mix64(s ^ (b & MASK64))
    s = mix64(s ^ (c & MASK64))
    return s


def next_u64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + GOLDEN) & MASK64
    return state, mix64(state)


def u64_block(seed: int, count: int) -> np.ndarray:
    """Vectorized splitmix64 stream: the first `count` outputs for `seed`."""
    with np.errstate(over="ignore"):
        states = np.uint64(seed) + np.arange(1, count + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        z = (states ^ (states >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))


def bootstrap_indices(n: int, seed: int) -> np.ndarray:
    """n draws with replacement from range(n), as int64 row indices."""
    return (u64_block(seed, n) % np.uint64(n)).astype(np.int64)


def uniforms(seed: int, count: int) -> np.ndarray:
    """`count` floats in [0, 1) derived from the splitmix64 stream."""
    return (u64_block(seed, count) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
