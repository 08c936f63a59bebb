"""Permutation-component combinatorics and exact moment formulas.

T(n, k) counts permutations of {1..n} with k components, where a component
boundary is a prefix length s whose entries are exactly {1..s}.  Two paths
through the hypercube share k-1 interior nodes exactly when the permutation
carrying one coordinate order to the other has k components, which is what
makes this triangle the backbone of the second-moment computations.

All table entries are exact big integers.  Moment formulas are evaluated in
exact rational arithmetic (a float parameter is used at its exact binary
value), so partition identities hold to the last bit and the factorially
large terms never drown the geometrically small ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .landscape import EtaSpec, Uniform, eta_support


# --- permutation statistics ----------------------------------------------

def _check_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    p = tuple(perm)
    n = len(p)
    if n == 0 or sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..n: {perm!r}")
    return p


def components(perm: Sequence[int]) -> int:
    """Number of prefix lengths s with {perm[0..s)} = {1..s}; at least 1."""
    p = _check_permutation(perm)
    count = 0
    running_max = 0
    for i, x in enumerate(p, start=1):
        running_max = max(running_max, x)
        if running_max == i:
            count += 1
    return count


def global_descents(perm: Sequence[int]) -> int:
    """Number of split points with every entry before larger than every entry after.

    Reading a permutation backward swaps this statistic with components - 1.
    """
    p = _check_permutation(perm)
    n = len(p)
    count = 0
    prefix_min = n + 1
    suffix_max = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix_max[j] = max(suffix_max[j + 1], p[j])
    for t in range(1, n):
        prefix_min = min(prefix_min, p[t - 1])
        if prefix_min > suffix_max[t]:
            count += 1
    return count


# --- the T(n, k) triangle ------------------------------------------------

@lru_cache(maxsize=None)
def _t1_values(n_max: int) -> tuple[int, ...]:
    """T(1,1) .. T(n_max,1) via n! = sum_k T(k,1) (n-k)!."""
    t1: list[int] = []
    for n in range(1, n_max + 1):
        acc = math.factorial(n)
        for k in range(1, n):
            acc -= t1[k - 1] * math.factorial(n - k)
        t1.append(acc)
    return tuple(t1)


def t_n1(n: int) -> int:
    """Permutations of {1..n} with a single component (indecomposable)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _t1_values(n)[n - 1]


@dataclass(frozen=True)
class TnkTable:
    """Triangle of exact counts T(n, k) for 1 <= k <= n <= n_max."""

    n_max: int
    rows: tuple[tuple[int, ...], ...]  # rows[n-1][k-1] = T(n, k)

    def value(self, n: int, k: int) -> int:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n = {n} outside table range 1..{self.n_max}")
        if not 1 <= k <= n:
            raise ValueError(f"k = {k} outside 1..{n}")
        return self.rows[n - 1][k - 1]

    def row(self, n: int) -> tuple[int, ...]:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n = {n} outside table range 1..{self.n_max}")
        return self.rows[n - 1]

    def entries(self):
        """Yield (n, k, T(n, k)) in row order."""
        for n, row in enumerate(self.rows, start=1):
            for k, v in enumerate(row, start=1):
                yield n, k, v

    def write_csv(self, fileobj) -> None:
        fileobj.write("n,k,t\n")
        for n, k, v in self.entries():
            fileobj.write(f"{n},{k},{v}\n")


DEFAULT_TABLE_N_MAX = 60


def t_table(n_max: int = DEFAULT_TABLE_N_MAX) -> TnkTable:
    """Build the triangle with T(n,k) = sum_s T(s,1) T(n-s,k-1)."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    t1 = _t1_values(n_max)
    rows: list[tuple[int, ...]] = []
    for n in range(1, n_max + 1):
        row = [t1[n - 1]]
        for k in range(2, n + 1):
            row.append(sum(t1[s - 1] * rows[n - s - 1][k - 2]
                           for s in range(1, n - k + 2)))
        rows.append(tuple(row))
    return TnkTable(n_max=n_max, rows=tuple(rows))


# --- moment formulas -----------------------------------------------------

MomentValue = Fraction


def _unit_fraction(name: str, x) -> Fraction:
    v = Fraction(x)
    if not 0 <= v <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return v


def expected_paths(n: int, alpha) -> Fraction:
    """Mean accessible-path count with the bottom node pinned: n (1-alpha)^(n-1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = _unit_fraction("alpha", alpha)
    return n * (1 - a) ** (n - 1)


def pair_term(n: int, k: int, alpha) -> Fraction:
    """Joint accessibility weight for a path pair sharing k-1 interior nodes.

    C(2n-2k, n-k) (1-alpha)^(2n-k-1) / (2n-k-1)!; this is exact when the two
    paths diverge at most once and an upper bound otherwise.  At k = n it
    reduces to the single-path probability (1-alpha)^(n-1) / (n-1)!.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    a = _unit_fraction("alpha", alpha)
    return (math.comb(2 * n - 2 * k, n - k) * (1 - a) ** (2 * n - k - 1)
            / Fraction(math.factorial(2 * n - k - 1)))


def second_moment_bound(n: int, alpha, table: TnkTable) -> Fraction:
    """Upper bound on the second moment: sum_k n! T(n,k) pair_term(n,k,alpha)."""
    if table.n_max < n:
        raise ValueError(f"table covers n <= {table.n_max}, need {n}")
    nfact = math.factorial(n)
    return sum((nfact * table.value(n, k)) * pair_term(n, k, alpha)
               for k in range(1, n + 1))


def s1_s2_split(n: int, alpha, delta, table: TnkTable) -> tuple[Fraction, Fraction]:
    """Split the second-moment sum at k = (1-delta) n.

    Returns (S1, S2) with S1 holding the terms k <= (1-delta) n and S2 the
    rest; S1 + S2 equals second_moment_bound(n, alpha, table) exactly.
    """
    d = Fraction(delta)
    if not 0 < d < 1:
        raise ValueError(f"delta must lie strictly in (0, 1), got {delta}")
    if table.n_max < n:
        raise ValueError(f"table covers n <= {table.n_max}, need {n}")
    cut = (1 - d) * n
    nfact = math.factorial(n)
    s1 = Fraction(0)
    s2 = Fraction(0)
    for k in range(1, n + 1):
        term = (nfact * table.value(n, k)) * pair_term(n, k, alpha)
        if k <= cut:
            s1 += term
        else:
            s2 += term
    return s1, s2


def percolation_expected(n: int, epsilon) -> Fraction:
    """Mean intact-path count under site percolation: n! epsilon^(n-1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    e = _unit_fraction("epsilon", epsilon)
    return math.factorial(n) * e ** (n - 1)


# --- empirical bound constants -------------------------------------------

@dataclass(frozen=True)
class BoundDiagnostics:
    """Minimal constants making the growth bounds on T(n, k) hold on a scan range.

    The bounds leave their constants unspecified; these are measured outputs,
    not assertions.  ``few_components_c`` is the least c with
    T(n,k) <= k (n-k+1)! exp(c (k-1)/(n-k+1)); ``many_components_c`` the
    least c with T(n, n-l) <= c (l+1) ((n+2l)/5)^l; ``near_top_ratio`` the
    largest T(n, n-1)/n; ``single_component_deficit`` the least c' with
    T(n,1) >= n! (1 - c'/n).
    """

    n_max: int
    few_components_c: float
    many_components_c: float
    near_top_ratio: float
    single_component_deficit: float


def bound_diagnostics(n_max: int = 40, table: TnkTable | None = None) -> BoundDiagnostics:
    if table is None:
        table = t_table(n_max)
    if table.n_max < n_max:
        raise ValueError(f"table covers n <= {table.n_max}, need {n_max}")
    few_c = float("-inf")
    many_c = float("-inf")
    near_top = 0.0
    deficit = 0.0
    for n in range(1, n_max + 1):
        row = table.row(n)
        for k in range(1, n + 1):
            t = row[k - 1]
            log_t = math.log(t)
            if k >= 2:
                req = (n - k + 1) / (k - 1) * (
                    log_t - math.log(k) - math.log(math.factorial(n - k + 1)))
                few_c = max(few_c, req)
            l = n - k
            req = math.exp(log_t - math.log(l + 1) - (l * math.log((n + 2 * l) / 5) if l else 0.0))
            many_c = max(many_c, req)
        if n >= 2:
            near_top = max(near_top, row[n - 2] / n)
        deficit = max(deficit, float(n * (1 - Fraction(row[0], math.factorial(n)))))
    return BoundDiagnostics(
        n_max=n_max,
        few_components_c=few_c,
        many_components_c=many_c,
        near_top_ratio=near_top,
        single_component_deficit=deficit,
    )


# --- minimal interval mass of a noise density ----------------------------

@dataclass(frozen=True)
class PiecewiseDensity:
    """A density tabulated at sample points; mass via trapezoid interpolation."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("need matching xs/ys with at least two samples")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("xs must be strictly increasing")
        if any(y < 0 for y in self.ys):
            raise ValueError("density values must be non-negative")

    def _grid(self) -> tuple[np.ndarray, np.ndarray]:
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (ys[:-1] + ys[1:]) / 2.0)])
        return xs, cum / cum[-1]

    def cdf(self, x) -> np.ndarray:
        xs, cum = self._grid()
        return np.interp(x, xs, cum)

    def support(self) -> tuple[float, float]:
        return (self.xs[0], self.xs[-1])


def _cdf_and_support(eta):
    if isinstance(eta, Uniform):
        lo, hi = eta.lo, eta.hi
        return (lambda x: np.clip((np.asarray(x, dtype=np.float64) - lo) / (hi - lo), 0.0, 1.0),
                (lo, hi))
    if isinstance(eta, PiecewiseDensity):
        return eta.cdf, eta.support()
    lo, hi = eta_support(eta)
    if math.isinf(lo) or math.isinf(hi):
        raise ValueError("minimal interval mass requires a bounded support")
    raise ValueError(f"unsupported density: {eta!r}")


def c_eta_theta(eta: Union[EtaSpec, PiecewiseDensity], theta: float,
                *, grid: int = 10_000) -> float:
    """Smallest probability mass caught by any closed interval of length theta/2
    inside the support closure.

    Grid scan over ``grid`` left endpoints followed by a bounded local
    refinement around the best cell; the result is exact for flat densities
    and accurate to the refinement tolerance otherwise.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    cdf, (lo, hi) = _cdf_and_support(eta)
    width = theta / 2.0
    if width > hi - lo:
        raise ValueError(
            f"interval length {width} exceeds support length {hi - lo}")
    lefts = np.linspace(lo, hi - width, grid)
    masses = np.asarray(cdf(lefts + width)) - np.asarray(cdf(lefts))
    i = int(np.argmin(masses))
    best = float(masses[i])
    a = float(lefts[max(i - 1, 0)])
    b = float(lefts[min(i + 1, grid - 1)])
    if b > a:
        res = minimize_scalar(lambda x: float(cdf(x + width) - cdf(x)),
                              bounds=(a, b), method="bounded")
        best = min(best, float(res.fun))
    return best
