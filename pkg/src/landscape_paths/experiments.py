"""Reproducible Monte Carlo estimation of accessibility probabilities and moments.

Replicate r of a run seeded with s always uses the landscape stream
``mix64(s, r)`` (sweeps over several dimensions first derive a per-dimension
master seed ``mix64(s, n)``).  Replicates are evaluated in vectorized
batches; because every draw is a pure function of its stream and index, and
count/success accumulators are exact integers, batch size and evaluation
order cannot change any reported number.

Parameter sweeps are coupled: all parameter values of one replicate are
evaluated on a single draw of the underlying uniforms, so monotonicity in
the parameter holds per replicate, not merely on average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtri

from . import rng
from .hypercube import check_dimension
from .landscape import (AlphaHoC, EtaSpec, HoC, ModelSpec, _layer_values,
                        eta_ppf, fitness_from_uniforms)
from .pathcount import count_many, critical_alphas, exists_many

_BATCH_ELEMS = 1 << 23  # per-batch matrix budget: 8M float64 = 64 MiB


# --- result containers ----------------------------------------------------

@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    confidence: float
    replicates: int
    seed: int
    spec: Optional[ModelSpec]
    n: int


@dataclass(frozen=True)
class SweepRow:
    n: int
    parameter: float
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    confidence: float
    replicates: int
    seed: int
    mean_x: Optional[float] = None
    mean_x_se: Optional[float] = None


@dataclass(frozen=True)
class AlphaSweepResult:
    rows: tuple[SweepRow, ...]
    #: Per dimension, the linearly interpolated parameter where the estimated
    #: probability crosses one half (None if the grid never brackets it).
    half_crossings: dict[int, Optional[float]]


@dataclass(frozen=True)
class ThetaCouplingResult:
    rows: tuple[SweepRow, ...]
    #: Replicates whose path count ever decreased along the ascending drift
    #: grid; coupling makes this exactly zero.
    monotonicity_violations: int


@dataclass(frozen=True)
class SecondMomentReport:
    spec: Optional[ModelSpec]
    n: int
    replicates: int
    seed: int
    p_hat: float
    mean_x: float
    mean_x2: float
    lower_bound: float        # (mean X)^2 / mean X^2
    combined_se: float        # SE of p_hat - lower_bound, delta method
    holds: bool               # p_hat >= lower_bound - 3 * combined_se
    var_ratio: Optional[float]  # Var(X) / (mean X)^2
    vacuous: bool             # every replicate had X = 0


# --- interval helpers ------------------------------------------------------

def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    z = float(ndtri(0.5 + confidence / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _proportion_result(successes: int, trials: int, confidence: float,
                       seed: int, spec, n: int) -> EstimateResult:
    p = successes / trials
    lo, hi = wilson_interval(successes, trials, confidence)
    se = math.sqrt(p * (1.0 - p) / trials)
    return EstimateResult(estimate=p, std_error=se, ci_low=lo, ci_high=hi,
                          confidence=confidence, replicates=trials, seed=seed,
                          spec=spec, n=n)


def _mean_result(total: int, total_sq: int, trials: int, confidence: float,
                 seed: int, spec, n: int) -> EstimateResult:
    mean = float(total) / trials
    var = max(0.0, (float(total_sq) - float(total) ** 2 / trials) / max(trials - 1, 1))
    se = math.sqrt(var / trials)
    z = float(ndtri(0.5 + confidence / 2.0))
    return EstimateResult(estimate=mean, std_error=se,
                          ci_low=max(0.0, mean - z * se), ci_high=mean + z * se,
                          confidence=confidence, replicates=trials, seed=seed,
                          spec=spec, n=n)


# --- batching --------------------------------------------------------------

def _batches(replicates: int, n: int):
    size = max(1, _BATCH_ELEMS >> n)
    start = 0
    while start < replicates:
        yield start, min(size, replicates - start)
        start += size


def _uniform_batch(seed: int, start: int, count: int, n: int) -> np.ndarray:
    """Vertex-major uniforms: column r is the stream of replicate start + r."""
    seeds = rng.substream_seeds(seed, start, count)
    return rng.uniform_columns(seeds, 1 << n)


def _exact_sum(arr: np.ndarray) -> int:
    return int(arr.sum(dtype=object))


# --- core estimators -------------------------------------------------------

def estimate_p(spec: ModelSpec, n: int, replicates: int, seed: int,
               confidence: float = 0.95) -> EstimateResult:
    """Fraction of independent landscape draws with an accessible path."""
    check_dimension(n)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    successes = 0
    for start, count in _batches(replicates, n):
        fit = fitness_from_uniforms(spec, n, _uniform_batch(seed, start, count, n))
        successes += int(np.count_nonzero(exists_many(fit, n)))
    return _proportion_result(successes, replicates, confidence, seed, spec, n)


@dataclass(frozen=True)
class _CountSums:
    replicates: int
    positives: int
    s1: int  # sum X
    s2: int  # sum X^2
    s3: int  # sum X^3
    s4: int  # sum X^4


def _count_sums(spec: ModelSpec, n: int, replicates: int, seed: int) -> _CountSums:
    check_dimension(n)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    positives = s1 = s2 = s3 = s4 = 0
    for start, count in _batches(replicates, n):
        fit = fitness_from_uniforms(spec, n, _uniform_batch(seed, start, count, n))
        x = count_many(fit, n).astype(object)
        positives += int(np.count_nonzero(x))
        x2 = x * x
        s1 += _exact_sum(x)
        s2 += _exact_sum(x2)
        s3 += _exact_sum(x2 * x)
        s4 += _exact_sum(x2 * x2)
    return _CountSums(replicates, positives, s1, s2, s3, s4)


def estimate_moments(spec: ModelSpec, n: int, replicates: int, seed: int,
                     confidence: float = 0.95) -> tuple[EstimateResult, EstimateResult]:
    """Sample mean of the path count and of its square, with standard errors."""
    sums = _count_sums(spec, n, replicates, seed)
    first = _mean_result(sums.s1, sums.s2, replicates, confidence, seed, spec, n)
    second = _mean_result(sums.s2, sums.s4, replicates, confidence, seed, spec, n)
    return first, second


def second_moment_sanity(spec: ModelSpec, n: int, replicates: int,
                         seed: int) -> SecondMomentReport:
    """Check P(X > 0) against the moment lower bound (mean X)^2 / mean X^2.

    The bound holds for the true moments; the check allows three standard
    errors of the difference, with the bound's error propagated by the delta
    method using the sample covariance of X and X^2.  Also reports
    Var(X)/(mean X)^2, whose limit in the near-threshold regime is 3.
    """
    sums = _count_sums(spec, n, replicates, seed)
    r = sums.replicates
    p_hat = sums.positives / r
    if sums.s1 == 0:
        return SecondMomentReport(spec=spec, n=n, replicates=r, seed=seed,
                                  p_hat=p_hat, mean_x=0.0, mean_x2=0.0,
                                  lower_bound=0.0, combined_se=0.0, holds=True,
                                  var_ratio=None, vacuous=True)
    m1 = float(sums.s1) / r
    m2 = float(sums.s2) / r
    lower = m1 * m1 / m2
    denom = max(r - 1, 1)
    v11 = max(0.0, (float(sums.s2) - float(sums.s1) ** 2 / r) / denom)
    v22 = max(0.0, (float(sums.s4) - float(sums.s2) ** 2 / r) / denom)
    v12 = (float(sums.s3) - float(sums.s1) * float(sums.s2) / r) / denom
    ga = 2.0 * m1 / m2
    gb = -(m1 * m1) / (m2 * m2)
    var_lower = max(0.0, (ga * ga * v11 + 2.0 * ga * gb * v12 + gb * gb * v22) / r)
    se_p = math.sqrt(p_hat * (1.0 - p_hat) / r)
    combined = math.sqrt(se_p * se_p + var_lower)
    return SecondMomentReport(spec=spec, n=n, replicates=r, seed=seed,
                              p_hat=p_hat, mean_x=m1, mean_x2=m2,
                              lower_bound=lower, combined_se=combined,
                              holds=p_hat >= lower - 3.0 * combined,
                              var_ratio=(m2 - m1 * m1) / (m1 * m1),
                              vacuous=False)


# --- coupled sweeps --------------------------------------------------------

def _critical_alphas_all(n: int, replicates: int, master_seed: int) -> np.ndarray:
    """Per-replicate largest starting fitness admitting an accessible path."""
    out = np.empty(replicates, dtype=np.float64)
    for start, count in _batches(replicates, n):
        fit = fitness_from_uniforms(HoC(), n, _uniform_batch(master_seed, start, count, n))
        out[start:start + count] = critical_alphas(fit, n)
    return out


def _interp_half_crossing(alphas: Sequence[float], p_hats: Sequence[float]) -> Optional[float]:
    for i in range(len(alphas) - 1):
        if p_hats[i] >= 0.5 > p_hats[i + 1]:
            if p_hats[i] == p_hats[i + 1]:
                return float(alphas[i])
            frac = (p_hats[i] - 0.5) / (p_hats[i] - p_hats[i + 1])
            return float(alphas[i] + frac * (alphas[i + 1] - alphas[i]))
    return None


def sweep_alpha(n_list: Sequence[int], alpha_list: Sequence[float], replicates: int,
                seed: int, confidence: float = 0.95) -> AlphaSweepResult:
    """Estimate the accessibility probability over a grid of bottom-node pins.

    For each dimension all grid values share one draw of the interior
    uniforms per replicate: existence for pin value a is a* > a where a* is
    the replicate's critical starting fitness.  The estimated curve is
    therefore exactly non-increasing in the pin.
    """
    alphas = [float(a) for a in alpha_list]
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise ValueError("alpha grid values must lie in [0, 1]")
    if sorted(alphas) != alphas:
        raise ValueError("alpha grid must be ascending")
    rows: list[SweepRow] = []
    crossings: dict[int, Optional[float]] = {}
    for n in sorted(n_list):
        master = rng.mix64(seed, n)
        crit = _critical_alphas_all(n, replicates, master)
        p_hats = []
        for a in alphas:
            succ = int(np.count_nonzero(crit > a))
            res = _proportion_result(succ, replicates, confidence, seed, AlphaHoC(a), n)
            p_hats.append(res.estimate)
            rows.append(SweepRow(n=n, parameter=a, estimate=res.estimate,
                                 std_error=res.std_error, ci_low=res.ci_low,
                                 ci_high=res.ci_high, confidence=confidence,
                                 replicates=replicates, seed=seed))
        crossings[n] = _interp_half_crossing(alphas, p_hats)
    return AlphaSweepResult(rows=tuple(rows), half_crossings=crossings)


def choc_curve(n_list: Sequence[int], replicates: int, seed: int,
               confidence: float = 0.95) -> tuple[SweepRow, ...]:
    """Accessibility probability of the constrained model (pin = 0) per dimension."""
    rows = []
    for n in sorted(n_list):
        master = rng.mix64(seed, n)
        crit = _critical_alphas_all(n, replicates, master)
        succ = int(np.count_nonzero(crit > 0.0))
        res = _proportion_result(succ, replicates, confidence, seed, AlphaHoC(0.0), n)
        rows.append(SweepRow(n=n, parameter=0.0, estimate=res.estimate,
                             std_error=res.std_error, ci_low=res.ci_low,
                             ci_high=res.ci_high, confidence=confidence,
                             replicates=replicates, seed=seed))
    return tuple(rows)


def rmf_theta_coupling(n: int, theta_list: Sequence[float], eta: EtaSpec,
                       replicates: int, seed: int,
                       confidence: float = 0.95) -> ThetaCouplingResult:
    """Evaluate drift landscapes over an ascending drift grid on shared noise.

    Each replicate draws its noise once; every drift value reuses it, so the
    accessible-edge set and hence the path count are non-decreasing along the
    grid within every single replicate.
    """
    thetas = [float(t) for t in theta_list]
    if any(t < 0 for t in thetas):
        raise ValueError("drift values must be non-negative")
    if sorted(thetas) != thetas:
        raise ValueError("drift grid must be ascending")
    check_dimension(n)
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    layers = _layer_values(n)[:, None]
    positives = [0] * len(thetas)
    s1 = [0] * len(thetas)
    s2 = [0] * len(thetas)
    violations = 0
    for start, count in _batches(replicates, n):
        noise = eta_ppf(eta, _uniform_batch(seed, start, count, n))
        prev = None
        for j, theta in enumerate(thetas):
            x = count_many(theta * layers + noise, n).astype(object)
            positives[j] += int(np.count_nonzero(x))
            s1[j] += _exact_sum(x)
            s2[j] += _exact_sum(x * x)
            if prev is not None:
                violations += int(np.count_nonzero(x < prev))
            prev = x
    rows = []
    for j, theta in enumerate(thetas):
        p = _proportion_result(positives[j], replicates, confidence, seed, None, n)
        mean = float(s1[j]) / replicates
        var = max(0.0, (float(s2[j]) - float(s1[j]) ** 2 / replicates) / max(replicates - 1, 1))
        rows.append(SweepRow(n=n, parameter=theta, estimate=p.estimate,
                             std_error=p.std_error, ci_low=p.ci_low,
                             ci_high=p.ci_high, confidence=confidence,
                             replicates=replicates, seed=seed,
                             mean_x=mean, mean_x_se=math.sqrt(var / replicates)))
    return ThetaCouplingResult(rows=tuple(rows), monotonicity_violations=violations)
