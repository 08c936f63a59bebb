"""Enumeration utilities for the directed n-dimensional binary hypercube.

A node is a plain integer bitmask; bit i set means coordinate i has mutated.
Edges point from a node to the nodes obtained by setting one more bit, so
every edge increases the layer (popcount) by exactly one.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ResourceLimitError

#: Largest dimension for which full-landscape arrays are allocated by default.
DEFAULT_DIM_CAP = 28


def check_dimension(n: int, dim_cap: int = DEFAULT_DIM_CAP) -> None:
    """Reject dimensions that are invalid or exceed the memory cap."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n > dim_cap:
        raise ResourceLimitError(
            f"dimension {n} exceeds cap {dim_cap}; full fitness arrays need O(2^n) memory"
        )


def check_node(n: int, v: int) -> None:
    if not 0 <= v < (1 << n):
        raise ValueError(f"node {v} out of range for dimension {n}")


def popcount(v: int) -> int:
    return v.bit_count()


def layer(v: int) -> int:
    """Distance from the all-zeroes node; equals the popcount of v."""
    return v.bit_count()


def popcounts(values: np.ndarray) -> np.ndarray:
    """Elementwise popcount of an unsigned integer array."""
    return np.bitwise_count(values)


def layer_sizes(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return [math.comb(n, k) for k in range(n + 1)]


def layer_nodes(n: int, k: int) -> np.ndarray:
    """All nodes of popcount k in strictly increasing numeric order.

    Uses the next-bit-permutation (Gosper) enumeration, which visits the
    C(n, k) masks in increasing order without touching the other 2^n nodes.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"layer index {k} out of range for dimension {n}")
    count = math.comb(n, k)
    out = np.empty(count, dtype=np.int64)
    if k == 0:
        out[0] = 0
        return out
    v = (1 << k) - 1
    for i in range(count):
        out[i] = v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return out


def out_neighbors(n: int, v: int) -> np.ndarray:
    """Nodes reached by setting exactly one zero bit of v, ascending."""
    check_node(n, v)
    return np.array([v | (1 << i) for i in range(n) if not v & (1 << i)], dtype=np.int64)


def hamming(u: int, v: int) -> int:
    """Number of coordinates where u and v differ."""
    if u < 0 or v < 0:
        raise ValueError("nodes must be non-negative")
    return (u ^ v).bit_count()
