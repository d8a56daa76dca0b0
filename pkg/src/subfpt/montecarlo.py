"""Estimation harness: ensembles of samplers, transform estimators with
standard errors, and a two-sample Kolmogorov-Smirnov check.

Ensembles are split into a fixed number of chunks, each owning its own rng
stream keyed by the chunk index; workers map over chunks and results are
merged in chunk order, so output is bit-identical for any worker count.
Censored samples contribute zero to transform estimators (never discarded),
and the censored fraction is reported together with an upward bias bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import ks_2samp

from .errors import ModelError
from .models import ProblemTriple
from .sampler import FptBatch, RngStream, sample_fpt_batch, sample_fpt_random_levels

__all__ = ["Estimate", "estimate_lt", "estimate_probability", "ks_two_sample",
           "run_ensemble", "estimate_composite_lhs", "NUM_CHUNKS"]

NUM_CHUNKS = 256


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n: int
    censored_fraction: float
    bias_bound: float = 0.0

    def __post_init__(self):
        if self.std_error < 0 or not 0.0 <= self.censored_fraction <= 1.0:
            raise ModelError("invalid estimate fields")

    def ci95(self) -> tuple[float, float]:
        h = 1.96 * self.std_error
        return self.value - h, self.value + h


def _mean_se(vals: np.ndarray) -> tuple[float, float]:
    n = len(vals)
    m = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return m, se


def estimate_lt(batch: FptBatch, q: float, v: float) -> Estimate:
    """Mean of exp(-q*time - v*overshoot) over finite samples, censored
    samples contributing zero.  The bias bound is the largest value a
    censored path could still contribute, exp(-q * reached physical time)."""
    if len(batch) == 0:
        raise ModelError("empty batch")
    fin = batch.finite
    vals = np.zeros(len(batch))
    vals[fin] = np.exp(-q * batch.times[fin] - v * batch.overshoots[fin])
    m, se = _mean_se(vals)
    cens = batch.censored
    cfrac = float(cens.mean())
    bias = 0.0
    if cens.any() and q > 0:
        reached = batch.censor_times[cens]
        reached = reached[np.isfinite(reached)]
        if reached.size:
            bias = cfrac * float(np.exp(-q * reached.min()))
        else:
            bias = cfrac
    elif cens.any() and q == 0.0:
        bias = cfrac
    return Estimate(m, se, len(batch), cfrac, bias)


def estimate_probability(batch: FptBatch) -> Estimate:
    """Empirical P(T finite), with the censored fraction as the bias bound."""
    return estimate_lt(batch, 0.0, 0.0)


def ks_two_sample(x, y, level: float = 0.01):
    """Sup-distance of the empirical CDFs with an accept/reject decision at
    the given level; returns (statistic, p_value, accept)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ModelError("empty batch")
    res = ks_2samp(x, y, method="asymp")
    return float(res.statistic), float(res.pvalue), bool(res.pvalue > level)


def _chunk_sizes(n: int) -> list[int]:
    k = min(NUM_CHUNKS, n)
    base = n // k
    sizes = [base + (1 if i < n % k else 0) for i in range(k)]
    return sizes


def run_ensemble(problem: ProblemTriple, method: str, n: int, seed: int,
                 workers: int = 1, op_step: float = 1e-3,
                 op_horizon: float = 50.0, bridge: bool = False) -> FptBatch:
    """n first-passage samples, deterministically partitioned into chunks
    with per-chunk streams; identical output for any ``workers``."""
    if n < 1:
        raise ModelError("n must be >= 1")
    sizes = _chunk_sizes(n)

    def one(args):
        idx, size = args
        stream = RngStream(seed, idx)
        return sample_fpt_batch(problem, method, size, op_step, op_horizon,
                                stream, bridge=bridge)

    jobs = list(enumerate(sizes))
    if workers <= 1:
        parts = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    return FptBatch.concatenate(parts)


def estimate_composite_lhs(problem: ProblemTriple, q: float, p: float, v: float,
                           n: int, seed: int, op_step: float = 1e-3,
                           op_horizon: float = 1e4,
                           bridge: bool = False) -> tuple[float, float]:
    """Monte Carlo counterpart of the factor identity: draw Exp(p) levels,
    run the reduced sampler against each, and average
    exp(-q * time - v * overshoot) over finite passages.  Censored paths
    contribute zero.  Returns (estimate, standard error)."""
    vals = np.zeros(n)
    start = 0
    for idx, size in enumerate(_chunk_sizes(n)):
        stream = RngStream(seed, idx)
        gen = stream.generator()
        levels = gen.exponential(1.0 / p, size) + problem.start
        batch = sample_fpt_random_levels(problem, levels, op_step, op_horizon,
                                         gen, bridge=bridge)
        fin = batch.finite
        chunk_vals = np.zeros(size)
        chunk_vals[fin] = np.exp(-q * batch.times[fin] - v * batch.overshoots[fin])
        vals[start:start + size] = chunk_vals
        start += size
    m = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n))
    return m, se
