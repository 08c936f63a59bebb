"""Fitness landscape generation and measure-preserving transforms.

A landscape assigns a float64 fitness to every node of the directed
n-dimensional hypercube.  Removed vertices carry the sentinel ``ABSENT``
(-inf); path counting treats them explicitly, and the endpoints are never
absent in generated landscapes.

All randomness is counter-based (see :mod:`landscape_paths.rng`): the draw
for vertex v is a pure function of (seed, v), so regenerating with the same
(spec, n, seed) reproduces the identical landscape bit for bit, and fixing
the seed while varying a model parameter yields coupled landscapes that
share their underlying uniforms.
"""

from __future__ import annotations

import dataclasses
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.special import ndtri

from . import rng
from .errors import ResourceLimitError
from .hypercube import DEFAULT_DIM_CAP, check_dimension, popcounts

ABSENT = float("-inf")


# --- noise distributions -------------------------------------------------

@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Uniform requires lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError(f"Normal requires sd > 0, got {self.sd}")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"Exponential requires rate > 0, got {self.rate}")


EtaSpec = Union[Uniform, Normal, Exponential]


def eta_ppf(eta: EtaSpec, u: np.ndarray) -> np.ndarray:
    """Inverse CDF applied elementwise; consumes exactly one uniform per value."""
    u = np.asarray(u, dtype=np.float64)
    if isinstance(eta, Uniform):
        return eta.lo + u * (eta.hi - eta.lo)
    if isinstance(eta, Normal):
        return eta.mean + eta.sd * ndtri(u)
    if isinstance(eta, Exponential):
        return -np.log1p(-u) / eta.rate
    raise ValueError(f"unknown noise distribution: {eta!r}")


def eta_support(eta: EtaSpec) -> tuple[float, float]:
    """Closure of the support; infinite endpoints for unbounded distributions."""
    if isinstance(eta, Uniform):
        return (eta.lo, eta.hi)
    if isinstance(eta, Normal):
        return (float("-inf"), float("inf"))
    if isinstance(eta, Exponential):
        return (0.0, float("inf"))
    raise ValueError(f"unknown noise distribution: {eta!r}")


# --- model specifications ------------------------------------------------

@dataclass(frozen=True)
class HoC:
    """All-ones node pinned to 1, every other node i.i.d. U(0, 1)."""


@dataclass(frozen=True)
class AlphaHoC:
    """HoC with the all-zeroes node additionally pinned to alpha (CHoC: alpha=0)."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class RMF:
    """Additive drift theta per layer plus i.i.d. noise eta at every node."""

    theta: float
    eta: EtaSpec

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")


@dataclass(frozen=True)
class Percolation:
    """Interior vertices kept independently with probability epsilon; fitness = layer."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class PinnedUniform:
    """Uniform interior with both endpoint fitnesses pinned; test hook for
    endpoint-translation arguments (bottom at the all-zeroes node, top at the
    all-ones node)."""

    bottom: float
    top: float

    def __post_init__(self):
        for name, v in (("bottom", self.bottom), ("top", self.top)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


ModelSpec = Union[HoC, AlphaHoC, RMF, Percolation, PinnedUniform]


def choc() -> AlphaHoC:
    """The constrained model: all-zeroes node pinned to 0."""
    return AlphaHoC(0.0)


# --- landscapes ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Landscape:
    n: int
    fitness: np.ndarray  # float64, length 2**n, read-only
    spec: Optional[ModelSpec]
    seed: int

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def present(self) -> np.ndarray:
        return self.fitness != ABSENT


@lru_cache(maxsize=4)
def _layer_values(n: int) -> np.ndarray:
    vals = popcounts(np.arange(1 << n, dtype=np.uint64)).astype(np.float64)
    vals.setflags(write=False)
    return vals


def _seal(land_fitness: np.ndarray) -> np.ndarray:
    land_fitness.setflags(write=False)
    return land_fitness


def fitness_from_uniforms(spec: ModelSpec, n: int, u: np.ndarray) -> np.ndarray:
    """Map per-vertex uniforms to fitness values; axis 0 indexes the vertex.

    Accepts a vector of 2**n uniforms or a (2**n, replicates) matrix.  This
    is the single definition of every model's draw; `generate` applies it to
    one stream and the experiment drivers apply it to whole batches.
    """
    size = 1 << n
    if u.shape[0] != size:
        raise ValueError(f"expected {size} uniforms per landscape, got {u.shape[0]}")
    if isinstance(spec, HoC):
        f = u.astype(np.float64, copy=True)
        f[size - 1] = 1.0
        return f
    if isinstance(spec, AlphaHoC):
        f = u.astype(np.float64, copy=True)
        f[0] = spec.alpha
        f[size - 1] = 1.0
        return f
    if isinstance(spec, PinnedUniform):
        f = u.astype(np.float64, copy=True)
        f[0] = spec.bottom
        f[size - 1] = spec.top
        return f
    layers = _layer_values(n).reshape((size,) + (1,) * (u.ndim - 1))
    if isinstance(spec, RMF):
        return spec.theta * layers + eta_ppf(spec.eta, u)
    if isinstance(spec, Percolation):
        f = np.where(u < spec.epsilon, layers, ABSENT)
        f[0] = 0.0
        f[size - 1] = float(n)
        return f
    raise ValueError(f"unknown model spec: {spec!r}")


def generate(spec: ModelSpec, n: int, seed: int, *, dim_cap: int = DEFAULT_DIM_CAP) -> Landscape:
    """Draw one landscape; deterministic in (spec, n, seed)."""
    check_dimension(n, dim_cap)
    u = rng.uniforms(seed, 1 << n)
    f = fitness_from_uniforms(spec, n, u)
    return Landscape(n=n, fitness=_seal(f), spec=spec, seed=seed)


def generate_pinned(n: int, seed: int, bottom: float, top: float,
                    *, dim_cap: int = DEFAULT_DIM_CAP) -> Landscape:
    """Uniform landscape with both endpoints pinned (the two-sided test hook)."""
    return generate(PinnedUniform(bottom, top), n, seed, dim_cap=dim_cap)


def landscape_from_fitness(n: int, fitness: np.ndarray, *,
                           spec: Optional[ModelSpec] = None, seed: int = 0) -> Landscape:
    """Wrap an explicit fitness array (copied) as a landscape."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    f = np.asarray(fitness, dtype=np.float64).copy()
    if f.shape != (1 << n,):
        raise ValueError(f"fitness must have shape ({1 << n},), got {f.shape}")
    return Landscape(n=n, fitness=_seal(f), spec=spec, seed=seed)


def shift_transform(land: Landscape, b: float) -> Landscape:
    """Cyclic translation by b: values at most 1-b move up by b, the rest wrap down.

    Defined for landscapes with all present values in [0, 1].  When the top
    node is pinned at 1-b and the bottom at a <= 1-b, a path is accessible
    before the transform iff it is accessible after it.
    """
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"shift must lie in [0, 1], got {b}")
    vals = land.fitness[land.present]
    if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
        raise ValueError("shift_transform requires fitness values in [0, 1]")
    g = np.where(land.fitness <= 1.0 - b, land.fitness + b, land.fitness - 1.0 + b)
    return Landscape(n=land.n, fitness=_seal(g), spec=land.spec, seed=land.seed)


def thin(land: Landscape, delta: float, seed: int) -> Landscape:
    """Remove each interior vertex independently with probability delta."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    u = rng.uniforms(seed, land.size)
    removed = u < delta
    removed[0] = False
    removed[land.size - 1] = False
    g = np.where(removed, ABSENT, land.fitness)
    return Landscape(n=land.n, fitness=_seal(g), spec=land.spec, seed=land.seed)


def rmf_eta_values(land: Landscape) -> np.ndarray:
    """Recover the noise values of a drift landscape: fitness - theta * layer."""
    if not isinstance(land.spec, RMF):
        raise ValueError("eta recovery requires a drift (RMF) landscape")
    return land.fitness - land.spec.theta * _layer_values(land.n)


# --- (de)serialization ---------------------------------------------------

def spec_to_json(spec: Optional[ModelSpec]):
    if spec is None:
        return None
    if isinstance(spec, HoC):
        return {"model": "hoc"}
    if isinstance(spec, AlphaHoC):
        return {"model": "alpha-hoc", "alpha": spec.alpha}
    if isinstance(spec, RMF):
        return {"model": "rmf", "theta": spec.theta, "eta": _eta_to_json(spec.eta)}
    if isinstance(spec, Percolation):
        return {"model": "percolation", "epsilon": spec.epsilon}
    if isinstance(spec, PinnedUniform):
        return {"model": "pinned-uniform", "bottom": spec.bottom, "top": spec.top}
    raise ValueError(f"unknown model spec: {spec!r}")


def _eta_to_json(eta: EtaSpec):
    if isinstance(eta, Uniform):
        return {"dist": "uniform", "lo": eta.lo, "hi": eta.hi}
    if isinstance(eta, Normal):
        return {"dist": "normal", "mean": eta.mean, "sd": eta.sd}
    if isinstance(eta, Exponential):
        return {"dist": "exponential", "rate": eta.rate}
    raise ValueError(f"unknown noise distribution: {eta!r}")


def eta_from_json(obj) -> EtaSpec:
    kind = obj.get("dist")
    if kind == "uniform":
        return Uniform(float(obj["lo"]), float(obj["hi"]))
    if kind == "normal":
        return Normal(float(obj["mean"]), float(obj["sd"]))
    if kind == "exponential":
        return Exponential(float(obj["rate"]))
    raise ValueError(f"unknown noise distribution: {obj!r}")


def spec_from_json(obj) -> Optional[ModelSpec]:
    if obj is None:
        return None
    kind = obj.get("model")
    if kind == "hoc":
        return HoC()
    if kind == "alpha-hoc":
        return AlphaHoC(float(obj["alpha"]))
    if kind == "rmf":
        return RMF(float(obj["theta"]), eta_from_json(obj["eta"]))
    if kind == "percolation":
        return Percolation(float(obj["epsilon"]))
    if kind == "pinned-uniform":
        return PinnedUniform(float(obj["bottom"]), float(obj["top"]))
    raise ValueError(f"unknown model spec: {obj!r}")


_DUMP_MAGIC = "# landscape-paths landscape v1"


def dump(land: Landscape, fileobj: io.TextIOBase) -> None:
    """Write the textual dump: header plus one fitness per line in node order."""
    header = {"n": land.n, "seed": land.seed, "model": spec_to_json(land.spec)}
    fileobj.write(_DUMP_MAGIC + "\n")
    fileobj.write("# " + json.dumps(header, sort_keys=True) + "\n")
    for v in land.fitness:
        fileobj.write("absent\n" if v == ABSENT else repr(float(v)) + "\n")


def load(fileobj: io.TextIOBase) -> Landscape:
    magic = fileobj.readline().rstrip("\n")
    if magic != _DUMP_MAGIC:
        raise ValueError("not a landscape dump")
    header_line = fileobj.readline().rstrip("\n")
    if not header_line.startswith("# "):
        raise ValueError("missing landscape header")
    header = json.loads(header_line[2:])
    n = int(header["n"])
    size = 1 << n
    f = np.empty(size, dtype=np.float64)
    for i in range(size):
        tok = fileobj.readline().strip()
        f[i] = ABSENT if tok == "absent" else float(tok)
    return Landscape(n=n, fitness=_seal(f), spec=spec_from_json(header["model"]),
                     seed=int(header["seed"]))
