"""Counter-based random number generation.

Every draw is a pure function of (stream seed, draw index), so output never
depends on evaluation order, batching, or thread count.  The core primitive
is the splitmix64 sequence: output i of stream s is

    finalize(s + (i + 1) * GOLDEN)   mod 2**64

with the standard splitmix64 finalizer.  ``mix64`` doubles as the published
replicate-seed derivation: replicate r of a run seeded with s uses stream
seed ``mix64(s, r)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(GOLDEN)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
# (x >> 11) has 53 bits; adding 0.5 and scaling lands strictly inside (0, 1).
_TO_UNIT = 2.0**-53


def mix64(seed: int, index: int) -> int:
    """Output ``index`` of the splitmix64 stream seeded with ``seed``."""
    z = (seed + (index + 1) * GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def _finalize(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _U_MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * _U_MIX2
    return z ^ (z >> np.uint64(31))


def substream_seeds(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorized ``mix64(seed, r)`` for r in [start, start + count)."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _finalize(idx * _U_GOLDEN + np.uint64(seed & MASK64))


def raw64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """The uint64 outputs offset .. offset+count-1 of stream ``seed``."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    return _finalize(idx * _U_GOLDEN + np.uint64(seed & MASK64))


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """float64 uniforms strictly inside (0, 1), one per draw index."""
    bits = raw64(seed, count, offset)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_UNIT


def uniform_matrix(seeds: np.ndarray, count: int) -> np.ndarray:
    """Row r holds ``uniforms(seeds[r], count)``; shape (len(seeds), count)."""
    seeds = np.asarray(seeds, dtype=np.uint64)
    idx = np.arange(1, count + 1, dtype=np.uint64) * _U_GOLDEN
    bits = _finalize(seeds[:, None] + idx[None, :])
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_UNIT


def uniform_columns(seeds: np.ndarray, count: int) -> np.ndarray:
    """Transposed uniform_matrix: entry [i, r] is draw i of stream seeds[r].

    Shape (count, len(seeds)), C-contiguous, so one draw index occupies one
    contiguous row; batched landscape kernels want this layout.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    idx = np.arange(1, count + 1, dtype=np.uint64) * _U_GOLDEN
    bits = _finalize(idx[:, None] + seeds[None, :])
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_UNIT
