"""Exact counting and existence testing of accessible paths.

An accessible path runs from the all-zeroes node to the all-ones node,
gains one layer per step, visits no absent vertex, and strictly increases
fitness at every step.

The counter is a layer-by-layer dynamic program over the full node array:
c(v0) = 1 and c(v) sums c(u) over present in-neighbors u with f(u) < f(v).
Counts are exact integers: a uint64 array suffices through n = 20 (20! <
2**64, and every intermediate count is at most layer! <= n!), and the
kernel transparently switches to Python big integers beyond that.  All
kernels accept a batch of landscapes as a (replicates, 2**n) fitness
matrix; the batch dimension is how replicate-level parallelism happens,
and it cannot affect any individual result.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import ResourceLimitError
from .hypercube import popcounts
from .landscape import ABSENT, RMF, Landscape, _layer_values, rmf_eta_values

#: Exact non-negative path count; Python ints widen without bound.
PathCount = int

_UINT64_DIM = 20          # n! < 2**64 holds up to n = 20
_GROUP_CACHE_DIM = 20     # cached index arrays cost ~n * 2**(n-1) int32 entries
_BRUTE_FORCE_DIM = 8


@lru_cache(maxsize=4)
def _layers(n: int) -> tuple[np.ndarray, ...]:
    """Node ids per layer, increasing within each layer; int32 indices."""
    pcs = popcounts(np.arange(1 << n, dtype=np.uint64))
    return tuple(np.flatnonzero(pcs == k).astype(np.int32) for k in range(n + 1))


def _build_groups(n: int) -> list[list[tuple[int, np.ndarray]]]:
    layers = _layers(n)
    groups: list[list[tuple[int, np.ndarray]]] = []
    for k in range(n):
        nodes = layers[k]
        per_bit = []
        for b in range(n):
            bit = 1 << b
            us = nodes[(nodes & bit) == 0]
            if us.size:
                per_bit.append((bit, us))
        groups.append(per_bit)
    return groups


_group_cache = lru_cache(maxsize=2)(_build_groups)


def _edge_groups(n: int) -> list[list[tuple[int, np.ndarray]]]:
    """Per-layer edge sources grouped by flipped bit.

    Within one (layer, bit) group the sources are distinct and so are the
    targets (us + bit), which makes fancy-indexed accumulation safe.
    """
    if n <= _GROUP_CACHE_DIM:
        return _group_cache(n)
    return _build_groups(n)


def _count_dtype(n: int):
    return np.uint64 if n <= _UINT64_DIM else object


def _as_columns(fitness: np.ndarray) -> np.ndarray:
    return fitness[:, None] if fitness.ndim == 1 else fitness


def count_many(fitness: np.ndarray, n: int) -> np.ndarray:
    """Accessible-path counts per column of a (2**n, replicates) fitness matrix."""
    fitness = _as_columns(fitness)
    counts = np.zeros(fitness.shape, dtype=_count_dtype(n))
    counts[0] = 1
    # Object entries hold Python ints; keep the gate as Python bools so
    # products never degrade to fixed-width numpy ints.
    as_object = counts.dtype == object
    for per_bit in _edge_groups(n):
        for bit, us in per_bit:
            vs = us + bit
            ok = fitness[vs] > fitness[us]
            counts[vs] += counts[us] * (ok.astype(object) if as_object else ok)
    return counts[(1 << n) - 1]


def exists_many(fitness: np.ndarray, n: int) -> np.ndarray:
    """Column-wise accessible-path existence for a (2**n, replicates) matrix."""
    fitness = _as_columns(fitness)
    reach = np.zeros(fitness.shape, dtype=bool)
    reach[0] = True
    for per_bit in _edge_groups(n):
        for bit, us in per_bit:
            vs = us + bit
            reach[vs] |= reach[us] & (fitness[vs] > fitness[us])
    return reach[(1 << n) - 1]


def critical_alphas(fitness: np.ndarray, n: int) -> np.ndarray:
    """Largest starting fitness that still admits an accessible path.

    Column-wise over a (2**n, replicates) matrix: ignores the bottom-node row
    and returns a* = max f(u) over layer-1 nodes u from which fitness strictly
    increases along some path to the top node (-inf if none).  A landscape
    with the bottom node set to x has an accessible path iff x < a*, so one
    backward pass serves every starting value at once, coupled exactly.
    """
    fitness = _as_columns(fitness)
    reach = np.zeros(fitness.shape, dtype=bool)
    reach[(1 << n) - 1] = True
    groups = _edge_groups(n)
    for k in range(n - 1, 0, -1):
        for bit, us in groups[k]:
            vs = us + bit
            reach[us] |= reach[vs] & (fitness[vs] > fitness[us])
    first = np.array([1 << b for b in range(n)], dtype=np.int64)
    cand = np.where(reach[first], fitness[first], ABSENT)
    return cand.max(axis=0)


def _require_endpoints(land: Landscape) -> None:
    if land.fitness[0] == ABSENT or land.fitness[land.size - 1] == ABSENT:
        raise ValueError("endpoint vertex is absent")


def count_accessible(land: Landscape) -> PathCount:
    """Exact number of accessible paths from the bottom node to the top node."""
    _require_endpoints(land)
    return int(count_many(land.fitness, land.n)[0])


def exists_accessible(land: Landscape) -> bool:
    """True iff at least one accessible path exists.

    Forward reachability over accessible edges, abandoning the sweep as soon
    as a whole frontier layer dies out; agrees with count_accessible > 0.
    """
    _require_endpoints(land)
    n, f = land.n, land.fitness
    layers = _layers(n)
    reach = np.zeros(land.size, dtype=bool)
    reach[0] = True
    groups = _edge_groups(n)
    for k in range(n):
        for bit, us in groups[k]:
            vs = us + bit
            reach[vs] |= reach[us] & (f[vs] > f[us])
        if not reach[layers[k + 1]].any():
            return False
    return bool(reach[land.size - 1])


@lru_cache(maxsize=2)
def _path_matrix(n: int) -> np.ndarray:
    """Row p = the n+1 node ids visited by coordinate order p; shape (n!, n+1)."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    bits = np.left_shift(1, perms)
    mat = np.zeros((perms.shape[0], n + 1), dtype=np.int64)
    np.cumsum(bits, axis=1, out=mat[:, 1:])
    return mat


def count_accessible_bruteforce(land: Landscape) -> PathCount:
    """Independent oracle: walk all n! coordinate orders explicitly.

    Checks presence and strict fitness increase at every step of every path;
    no dynamic programming is shared with count_accessible.
    """
    if land.n > _BRUTE_FORCE_DIM:
        raise ResourceLimitError(
            f"brute force enumerates n! paths; capped at n = {_BRUTE_FORCE_DIM}"
        )
    _require_endpoints(land)
    walk = land.fitness[_path_matrix(land.n)]
    ok = np.all(walk[:, 1:] > walk[:, :-1], axis=1)
    return int(np.count_nonzero(ok))


def layer_interval_count(land: Landscape, intervals) -> PathCount:
    """Certified lower bound: count paths whose interior noise stays in bands.

    For a drift landscape with noise values e(v) = f(v) - theta * layer(v),
    counts the paths whose layer-i interior vertex has e(v) inside the closed
    interval intervals[i-1].  The intervals must chain: each step from one
    band to the next, from the bottom node into the first band, and from the
    last band to the top node must gain more noise than the drift loses, so
    every counted path is accessible and the result never exceeds
    count_accessible(land).
    """
    if not isinstance(land.spec, RMF):
        raise ValueError("layer_interval_count requires a drift (RMF) landscape")
    n = land.n
    theta = land.spec.theta
    eta = rmf_eta_values(land)
    pairs = [(float(lo), float(hi)) for lo, hi in intervals]
    if len(pairs) != n - 1:
        raise ValueError(f"expected {n - 1} intervals, got {len(pairs)}")
    for lo, hi in pairs:
        if not lo <= hi:
            raise ValueError(f"malformed interval [{lo}, {hi}]")
    eta0, eta1 = float(eta[0]), float(eta[(1 << n) - 1])
    if n == 1:
        if not eta1 > eta0 - theta:
            raise ValueError("certificate chain violated: bottom-to-top step")
        return 1
    if not eta0 - theta < pairs[0][0]:
        raise ValueError("certificate chain violated: bottom node into first band")
    for i in range(n - 2):
        if not pairs[i + 1][0] > pairs[i][1] - theta:
            raise ValueError(f"certificate chain violated between bands {i + 1} and {i + 2}")
    if not eta1 > pairs[-1][1] - theta:
        raise ValueError("certificate chain violated: last band into top node")

    layers = _layers(n)
    masked = _layer_values(n).copy()
    for i, (lo, hi) in enumerate(pairs, start=1):
        nodes = layers[i]
        bad = (eta[nodes] < lo) | (eta[nodes] > hi)
        masked[nodes[bad]] = ABSENT
    masked[~land.present] = ABSENT
    return int(count_many(masked, n)[0])
