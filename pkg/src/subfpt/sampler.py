"""Random-variate and path generation.

Stable increments (trigonometric transformation of a uniform and an
exponential variate), subordinator paths, inverse time changes, and the two
first-passage samplers:

* ``fpt_direct`` assembles the time-changed process on the clock's
  operational grid and compares it against the moving boundary in physical
  time.
* ``fpt_reduced`` evolves the difference process X_t - boundary(clock_t),
  detects its level crossing in operational time, and maps the crossing
  through the clock.  Coupled boundary-over-clock increments are drawn
  exactly in law per step.

Both samplers share the crossing conventions: plain grid detection with an
O(step) bias by default, an optional Brownian-bridge correction for the
Gaussian component, exact within-cell crossing when the cell is
deterministic, event-exact detection for compound-Poisson drivers, and zero
overshoot reported for spectrally negative drivers (upward passage creeps).

Horizon censoring is a result state: ``censored`` samples carry time=inf
plus the physical time actually reached, so estimators can bound the
censoring bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import HorizonError, ModelError
from .models import (CompoundPoissonExp, JumpsNone, LevyModel, ProblemTriple,
                     SpectrallyNegativeStable, SubCompoundPoissonExp, SubordinatorModel,
                     SubStable, SubTemperedStable, TwoSidedStable)

__all__ = [
    "RngStream",
    "PathRecord",
    "FptSample",
    "FptBatch",
    "stable_subordinator_increment",
    "simulate_subordinator",
    "invert_path",
    "fpt_direct",
    "fpt_reduced",
    "sample_fpt_batch",
    "sample_fpt_coupled",
    "mittag_leffler_waiting_time",
    "exit_two_barrier",
]

_BLOCK_STEPS = 256


@dataclass(frozen=True)
class RngStream:
    """Reproducible random source: identical (seed, stream_id) give
    bit-identical output, distinct stream_ids are independent."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id * 100003 + 1 + k)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


# ---------------------------------------------------------------------------
# stable variates
# ---------------------------------------------------------------------------

def _stable_standard(index: float, rho: float, size, gen: np.random.Generator):
    """Strictly stable draws normalized so the characteristic exponent is
    -|z|^index * exp(i pi index (1/2 - rho) sgn z).

    For rho = 1 (index < 1) this is the positive stable law with
    E[exp(-u S)] = exp(-u^index).
    """
    a = index
    if a == 1.0:
        if abs(rho - 0.5) > 1e-14:
            raise ModelError("skewed index-1 stable increments are not supported")
        u = gen.uniform(-math.pi / 2, math.pi / 2, size)
        return np.tan(u)
    b = math.pi * (rho - 0.5)
    u = gen.uniform(-math.pi / 2, math.pi / 2, size)
    w = gen.standard_exponential(size)
    return (np.sin(a * (u + b)) / np.cos(u) ** (1.0 / a)
            * (np.cos(u - a * (u + b)) / w) ** ((1.0 - a) / a))


def _positive_stable(alpha: float, size, gen: np.random.Generator):
    return _stable_standard(alpha, 1.0, size, gen)


def stable_subordinator_increment(alpha: float, dt: float, rng) -> float:
    """One increment of the stable clock over dt: dt**(1/alpha) * S with
    E[exp(-u S)] = exp(-u**alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ModelError("alpha must lie in (0, 1)")
    if dt <= 0:
        raise ModelError("dt must be > 0")
    gen = _as_generator(rng)
    return float(dt ** (1.0 / alpha) * _positive_stable(alpha, None, gen))


def mittag_leffler_waiting_time(alpha: float, lam: float, rng, size=None):
    """Waiting time J with P(J > t) = E_alpha(-lam * t**alpha), drawn as
    (e/lam)**(1/alpha) * S with e a unit exponential and S positive stable."""
    if not 0.0 < alpha < 1.0:
        raise ModelError("alpha must lie in (0, 1)")
    if lam <= 0:
        raise ModelError("lam must be > 0")
    gen = _as_generator(rng)
    e = gen.standard_exponential(size)
    s = _positive_stable(alpha, size, gen)
    out = (e / lam) ** (1.0 / alpha) * s
    return out if size is not None else float(out)


def _tempered_stable_draws(alpha, theta, dt, gen):
    """Exact tempered-stable increments by exponential-tilting rejection,
    splitting each increment so the per-piece acceptance stays above e^-1."""
    dt = np.asarray(dt, dtype=float)
    flat = dt.ravel()
    pieces = np.maximum(1, np.ceil(flat * theta ** alpha).astype(int))
    owner = np.repeat(np.arange(flat.size), pieces)
    piece_dt = np.repeat(flat / pieces, pieces)
    out = np.zeros(piece_dt.size)
    pending = np.arange(piece_dt.size)
    for _ in range(200):
        if pending.size == 0:
            break
        prop = piece_dt[pending] ** (1.0 / alpha) * _positive_stable(
            alpha, pending.size, gen)
        acc = gen.random(pending.size) < np.exp(-theta * prop)
        out[pending[acc]] = prop[acc]
        pending = pending[~acc]
    if pending.size:
        raise ModelError("tempered-stable rejection failed to terminate")
    sums = np.zeros(flat.size)
    np.add.at(sums, owner, out)
    return sums.reshape(dt.shape)


def _sub_increment_draws(model: SubordinatorModel, dt, gen: np.random.Generator):
    """Increments of a subordinator over spans ``dt`` (array), exact in law."""
    dt = np.asarray(dt, dtype=float)
    out = model.drift * dt
    j = model.jumps
    if isinstance(j, SubStable):
        pos = dt > 0
        add = np.zeros_like(dt)
        add[pos] = dt[pos] ** (1.0 / j.alpha) * _positive_stable(
            j.alpha, int(pos.sum()), gen)
        out = out + add
    elif isinstance(j, SubTemperedStable):
        pos = dt > 0
        add = np.zeros_like(dt)
        if pos.any():
            add[pos] = _tempered_stable_draws(j.alpha, j.theta, dt[pos], gen)
        out = out + add
    elif isinstance(j, SubCompoundPoissonExp):
        counts = gen.poisson(j.rate * np.maximum(dt, 0.0))
        out = out + gen.gamma(counts, j.mean)
    return out


def _levy_increment_draws(model: LevyModel, dt: float, size, gen):
    """Increments of the driving process over a fixed span dt, exact in law.
    Compound-Poisson jumps land at the span end; the returned mask marks
    spans that contained a jump (suppresses bridge/refine there)."""
    out = np.full(size, model.drift * dt)
    if model.sigma2 > 0:
        out += math.sqrt(model.sigma2 * dt) * gen.standard_normal(size)
    jumped = np.zeros(size, dtype=bool)
    j = model.jumps
    if isinstance(j, CompoundPoissonExp):
        counts = gen.poisson(j.rate * dt, size)
        amounts = gen.gamma(counts, 1.0 / j.jump_rate)
        out += amounts if j.sign == "+" else -amounts
        jumped |= counts > 0
    elif isinstance(j, SpectrallyNegativeStable):
        out += dt ** (1.0 / j.index) * _stable_standard(j.index, 1.0 / j.index, size, gen)
        jumped |= np.ones(size, dtype=bool)
    elif isinstance(j, TwoSidedStable):
        out += dt ** (1.0 / j.index) * _stable_standard(j.index, j.rho, size, gen)
        jumped |= np.ones(size, dtype=bool)
    elif not isinstance(j, JumpsNone):
        raise ModelError("unsupported jump spec for grid simulation: %r" % (j,))
    return out, jumped


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathRecord:
    """A sampled path on a strictly increasing grid.  Values are
    right-continuous: the value at a node includes any jump at that node."""

    times: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if t.shape != v.shape or t.ndim != 1:
            raise ModelError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ModelError("times must be strictly increasing")
        if self.kind not in ("sub", "levy", "inverse", "subdiffusive"):
            raise ModelError("unknown path kind %r" % (self.kind,))
        if self.kind in ("sub", "inverse") and np.any(np.diff(v) < -1e-12):
            raise ModelError("%s paths must be nondecreasing" % self.kind)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,value,kind\n")
            for t, v in zip(self.times, self.values):
                fh.write("%.17g,%.17g,%s\n" % (t, v, self.kind))


def simulate_subordinator(model: SubordinatorModel, horizon: float, step: float,
                          rng) -> PathRecord:
    """Grid path of a subordinator with exact-in-law increments.
    Compound-Poisson jumps are placed at their exact event times,
    superimposed on the uniform grid."""
    if horizon <= 0 or step <= 0:
        raise ModelError("horizon and step must be > 0")
    model.check_time_change_admissible()
    gen = _as_generator(rng)
    grid = np.linspace(0.0, horizon, int(math.ceil(horizon / step)) + 1)
    j = model.jumps
    if isinstance(j, SubCompoundPoissonExp):
        n_ev = gen.poisson(j.rate * horizon)
        ev_times = np.sort(gen.uniform(0.0, horizon, n_ev))
        ev_sizes = gen.exponential(j.mean, n_ev)
        times = np.unique(np.concatenate([grid, ev_times]))
        jumps_at = np.zeros_like(times)
        idx = np.searchsorted(times, ev_times)
        np.add.at(jumps_at, idx, ev_sizes)
        values = model.drift * times + np.cumsum(jumps_at)
        return PathRecord(times, values, "sub")
    dts = np.diff(grid)
    incs = _sub_increment_draws(model, dts, gen)
    values = np.concatenate([[0.0], np.cumsum(incs)])
    return PathRecord(grid, values, "sub")


def invert_path(sub: PathRecord, times=None, num: Optional[int] = None,
                drift: float = 0.0) -> PathRecord:
    """Right-continuous generalized inverse of a nondecreasing path,
    sampled on a uniform physical grid (or explicit query ``times``).

    Within a cell the increment is split into the known ``drift`` part,
    crossed linearly, and a jump part placed at the cell end, so pure-drift
    cells invert exactly and jumped spans map to the constant cell-end time.
    """
    if sub.kind != "sub":
        raise ModelError("invert_path expects a kind='sub' record")
    v = sub.values
    s = sub.times
    terminal = v[-1]
    if times is None:
        n = num if num is not None else len(s)
        times = np.linspace(0.0, terminal, n)
    else:
        times = np.asarray(times, dtype=float)
        if np.any(times > terminal + 1e-12):
            raise HorizonError("query time beyond the terminal path value %g" % terminal)
    idx = np.searchsorted(v, times, side="left")
    idx = np.clip(idx, 1, len(s) - 1)
    t_lo, t_hi = s[idx - 1], s[idx]
    v_lo = v[idx - 1]
    out = np.where(times <= v_lo, t_lo, t_hi)
    if drift > 0:
        excess = times - v_lo
        cell_drift = drift * (t_hi - t_lo)
        lin = t_lo + excess / drift
        out = np.where((excess > 0) & (excess <= cell_drift + 1e-15), lin, out)
    out = np.maximum.accumulate(out)
    return PathRecord(times, out, "inverse")


# ---------------------------------------------------------------------------
# first-passage samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FptSample:
    time: float
    overshoot: float
    finite: bool
    method: str
    censored: bool = False
    censor_time: float = math.nan

    def __post_init__(self):
        if not self.finite and not math.isinf(self.time):
            raise ModelError("non-finite samples must carry time=inf")
        if self.finite and self.overshoot < 0:
            raise ModelError("overshoot must be >= 0 on finite samples")


@dataclass
class FptBatch:
    """Column-wise batch of first-passage samples."""

    times: np.ndarray
    overshoots: np.ndarray
    finite: np.ndarray
    censored: np.ndarray
    censor_times: np.ndarray
    method: str = "reduced"

    def __len__(self):
        return len(self.times)

    def sample(self, i: int) -> FptSample:
        return FptSample(float(self.times[i]), float(self.overshoots[i]),
                         bool(self.finite[i]), self.method,
                         bool(self.censored[i]), float(self.censor_times[i]))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("time,overshoot,finite,censored\n")
            for t, o, f, c in zip(self.times, self.overshoots, self.finite,
                                  self.censored):
                fh.write("%.17g,%.17g,%d,%d\n" % (t, o, int(f), int(c)))

    @staticmethod
    def concatenate(parts: list["FptBatch"]) -> "FptBatch":
        return FptBatch(
            np.concatenate([p.times for p in parts]),
            np.concatenate([p.overshoots for p in parts]),
            np.concatenate([p.finite for p in parts]),
            np.concatenate([p.censored for p in parts]),
            np.concatenate([p.censor_times for p in parts]),
            parts[0].method if parts else "reduced",
        )


def _empty_state(n: int, method: str) -> FptBatch:
    return FptBatch(np.full(n, np.inf), np.zeros(n), np.zeros(n, bool),
                    np.zeros(n, bool), np.full(n, np.nan), method)


def _immediate_batch(n: int, a_eff: float, method: str) -> FptBatch:
    b = _empty_state(n, method)
    b.times[:] = 0.0
    b.overshoots[:] = -a_eff
    b.finite[:] = True
    return b


def _is_event_driven(x: LevyModel) -> bool:
    return (x.sigma2 == 0.0 and x.drift <= 0.0
            and isinstance(x.jumps, CompoundPoissonExp) and x.jumps.sign == "+")


def _record_overshoot(x: LevyModel, excess):
    """Spectrally negative drivers creep: overshoot is exactly zero."""
    if x.is_spectrally_negative():
        return np.zeros_like(excess)
    return np.maximum(excess, 0.0)


# ---------------------------------------------------------------------------
# event-driven engine (compound-Poisson driver, no Gaussian part)
# ---------------------------------------------------------------------------

def _event_engine(problem: ProblemTriple, n: int, horizon: float,
                  gen: np.random.Generator, method: str,
                  a_levels: np.ndarray,
                  a_vec: Optional[np.ndarray] = None) -> list[FptBatch]:
    x = problem.x_process
    cp: CompoundPoissonExp = x.jumps  # type: ignore[assignment]
    clock, bnd = problem.time_change, problem.boundary
    nlev = len(a_levels)

    batches = [_empty_state(n, method) for _ in range(nlev)]
    t_op = np.zeros(n)
    phys = np.zeros(n)
    diff = np.zeros(n)  # running X_t - boundary(clock_t)
    lvl = np.zeros(n, dtype=np.int64)  # lowest level not yet crossed
    active = np.ones(n, bool)

    while active.any():
        # draws are taken for every path each round so that runs sharing a
        # stream stay coupled across levels and level sets
        de = gen.exponential(1.0 / cp.rate, n)
        dt_eff = np.minimum(de, np.maximum(horizon - t_op, 0.0))
        if method == "direct":
            dsub = _sub_increment_draws(clock, dt_eff, gen)
            jump = gen.exponential(1.0 / cp.jump_rate, n)
            dk = _sub_increment_draws(bnd, dsub, gen)
        else:
            dsub = _sub_increment_draws(clock, dt_eff, gen)
            dk = _sub_increment_draws(bnd, dsub, gen)
            jump = gen.exponential(1.0 / cp.jump_rate, n)
        hit_h = active & (t_op + de > horizon)
        step_m = active & ~hit_h

        phys[active] += dsub[active]
        diff[step_m] += x.drift * dt_eff[step_m] - dk[step_m] + jump[step_m]

        if hit_h.any():
            for k, b in enumerate(batches):
                sel = hit_h & (lvl <= k)
                b.censored[sel] = True
                b.censor_times[sel] = phys[sel]
            active &= ~hit_h

        for k in range(nlev):
            thr = a_vec if a_vec is not None else a_levels[k]
            crossed = step_m & (lvl == k) & (diff > thr)
            if crossed.any():
                b = batches[k]
                b.times[crossed] = phys[crossed]
                b.overshoots[crossed] = (diff - thr)[crossed] if a_vec is not None \
                    else diff[crossed] - a_levels[k]
                b.finite[crossed] = True
                lvl[crossed] += 1
        active &= lvl < nlev
        t_op += de
    return batches


# ---------------------------------------------------------------------------
# dense-grid engine
# ---------------------------------------------------------------------------

def _deterministic_cell(problem: ProblemTriple) -> bool:
    x = problem.x_process
    return (x.sigma2 == 0.0 and isinstance(x.jumps, JumpsNone)
            and problem.time_change.is_pure_drift()
            and problem.boundary.is_pure_drift())


def _grid_engine(problem: ProblemTriple, n: int, step: float, horizon: float,
                 gen: np.random.Generator, method: str, bridge: bool,
                 a_levels: np.ndarray,
                 a_vec: Optional[np.ndarray] = None) -> list[FptBatch]:
    """Active-set-compressed grid walk of the difference process.

    For the reduced method with a zero boundary the clock is independent of
    the driver, so clock spans are drawn once per resolved path over the
    exact elapsed operational time instead of per step.
    """
    x = problem.x_process
    clock, bnd = problem.time_change, problem.boundary
    nlev = len(a_levels)
    use_bridge = bridge and x.sigma2 > 0.0
    exact_cell = _deterministic_cell(problem)
    defer_clock = method == "reduced" and bnd.is_zero()

    batches = [_empty_state(n, method) for _ in range(nlev)]
    # operational crossing times per level (deferred-clock bookkeeping)
    tau_rec = np.full((nlev, n), np.inf)
    over_rec = np.zeros((nlev, n))
    idx = np.arange(n)
    diff = np.zeros(n)
    phys = np.zeros(n)  # physical clock value, tracked unless deferred
    lvl = np.zeros(n, dtype=np.int64)
    n_steps = int(math.ceil(horizon / step))

    for istep in range(n_steps):
        m = idx.size
        if m == 0:
            break
        if method == "direct":
            dsub = _sub_increment_draws(clock, np.full(m, step), gen)
            dx, jumped = _levy_increment_draws(x, step, m, gen)
            dk = _sub_increment_draws(bnd, dsub, gen)
        else:
            dx, jumped = _levy_increment_draws(x, step, m, gen)
            if defer_clock:
                dsub = None
                dk = 0.0
            else:
                dsub = _sub_increment_draws(clock, np.full(m, step), gen)
                dk = _sub_increment_draws(bnd, dsub, gen)
        u_bridge = gen.random(m) if use_bridge else None

        new_diff = diff + dx - dk
        if not defer_clock:
            new_phys = phys + dsub
        t_hi = (istep + 1) * step

        for k in range(nlev):
            thr = a_vec[idx] if a_vec is not None else a_levels[k]
            crossed = (lvl == k) & (new_diff > thr)
            if crossed.any():
                gi = idx[crossed]
                if exact_cell:
                    frac = ((thr if np.isscalar(thr) else thr[crossed])
                            - diff[crossed]) / (new_diff[crossed] - diff[crossed])
                    tau_rec[k, gi] = t_hi - step + frac * step
                    over_rec[k, gi] = 0.0
                    if not defer_clock:
                        batches[k].times[gi] = phys[crossed] + frac * dsub[crossed]
                else:
                    tau_rec[k, gi] = t_hi
                    over_rec[k, gi] = _record_overshoot(
                        x, (new_diff - thr)[crossed])
                    if not defer_clock:
                        batches[k].times[gi] = new_phys[crossed]
                lvl[crossed] += 1
            if use_bridge:
                # Brownian-bridge crossing probability for cells that end
                # below the level and contained no jump; one uniform per cell
                # keeps hits nested across levels
                cand = (lvl == k) & ~jumped & (new_diff <= thr)
                if cand.any():
                    g1 = thr - diff
                    g2 = thr - new_diff
                    with np.errstate(over="ignore", under="ignore"):
                        p_hit = np.exp(-2.0 * g1 * g2 / (x.sigma2 * step))
                    hit = cand & (u_bridge < p_hit)
                    if hit.any():
                        gi = idx[hit]
                        tau_rec[k, gi] = t_hi
                        over_rec[k, gi] = 0.0  # continuous crossing creeps
                        if not defer_clock:
                            batches[k].times[gi] = new_phys[hit]
                        lvl[hit] += 1

        keep = lvl < nlev
        if not keep.all():
            idx = idx[keep]
            diff = new_diff[keep]
            lvl = lvl[keep]
            if not defer_clock:
                phys = new_phys[keep]
        else:
            diff = new_diff
            if not defer_clock:
                phys = new_phys

    censor_tau = np.full(n, np.nan)
    censor_tau[idx] = n_steps * step
    if not defer_clock:
        censor_phys = np.full(n, np.nan)
        censor_phys[idx] = phys

    if defer_clock:
        # chain the clock over the recorded operational crossing times so
        # passage times stay coupled (and monotone) across levels
        prev_tau = np.zeros(n)
        prev_t = np.zeros(n)
        for k in range(nlev):
            tau_k = np.where(np.isfinite(tau_rec[k]), tau_rec[k], censor_tau)
            span = np.maximum(tau_k - prev_tau, 0.0)
            t_k = prev_t + _sub_increment_draws(clock, span, gen)
            fin = np.isfinite(tau_rec[k])
            batches[k].times[fin] = t_k[fin]
            batches[k].censor_times[~fin] = t_k[~fin]
            prev_tau, prev_t = tau_k, t_k

    for k in range(nlev):
        fin = np.isfinite(tau_rec[k])
        batches[k].finite[fin] = True
        batches[k].overshoots[fin] = over_rec[k, fin]
        batches[k].censored[~fin] = True
        if not defer_clock:
            batches[k].censor_times[~fin] = censor_phys[~fin]
    return batches


def _dispatch(problem: ProblemTriple, method: str, n: int, op_step: float,
              op_horizon: float, gen, bridge: bool,
              levels) -> list[FptBatch]:
    a_eff = np.asarray([lv - problem.start for lv in levels], dtype=float)
    if np.any(np.diff(a_eff) <= 0) and len(a_eff) > 1:
        raise ModelError("coupled levels must be strictly increasing")
    if a_eff[0] < 0:
        if len(a_eff) > 1:
            raise ModelError("coupled levels must sit at or above the start")
        return [_immediate_batch(n, a_eff[0], method)]
    if _is_event_driven(problem.x_process):
        return _event_engine(problem, n, op_horizon, gen, method, a_eff)
    return _grid_engine(problem, n, op_step, op_horizon, gen, method, bridge, a_eff)


def sample_fpt_batch(problem: ProblemTriple, method: str, n: int, op_step: float,
                     op_horizon: float, rng, bridge: bool = False) -> FptBatch:
    """Vectorized batch of first-passage samples from one rng stream."""
    if method not in ("direct", "reduced"):
        raise ModelError("method must be 'direct' or 'reduced'")
    if op_step <= 0 or op_horizon <= 0:
        raise ModelError("op_step and op_horizon must be > 0")
    if n < 1:
        raise ModelError("n must be >= 1")
    gen = _as_generator(rng)
    return _dispatch(problem, method, n, op_step, op_horizon, gen, bridge,
                     [problem.level])[0]


def sample_fpt_coupled(problem: ProblemTriple, levels, n: int, op_step: float,
                       op_horizon: float, rng, method: str = "reduced",
                       bridge: bool = False) -> list[FptBatch]:
    """Batches for several increasing levels driven by the same randomness;
    crossing times are nondecreasing in the level path by path."""
    gen = _as_generator(rng)
    return _dispatch(problem, method, n, op_step, op_horizon, gen, bridge,
                     list(levels))


def sample_fpt_random_levels(problem: ProblemTriple, levels, op_step: float,
                             op_horizon: float, rng, method: str = "reduced",
                             bridge: bool = False) -> FptBatch:
    """One sample per entry of ``levels``: path i is run against its own
    level (minus the common start).  Used for transforms over random levels."""
    gen = _as_generator(rng)
    a_vec = np.asarray(levels, dtype=float) - problem.start
    n = a_vec.size
    imm = a_vec < 0
    anchor = np.array([max(float(a_vec.max()), 0.0)])
    if _is_event_driven(problem.x_process):
        batch = _event_engine(problem, n, op_horizon, gen, method, anchor,
                              a_vec=np.where(imm, np.inf, a_vec))[0]
    else:
        batch = _grid_engine(problem, n, op_step, op_horizon, gen, method,
                             bridge, anchor, a_vec=np.where(imm, np.inf, a_vec))[0]
    if imm.any():
        batch.times[imm] = 0.0
        batch.overshoots[imm] = -a_vec[imm]
        batch.finite[imm] = True
        batch.censored[imm] = False
        batch.censor_times[imm] = np.nan
    return batch


def fpt_direct(problem: ProblemTriple, op_step: float, op_horizon: float, rng,
               bridge: bool = False) -> FptSample:
    """One draw of the first passage time over the moving boundary by direct
    simulation of the time-changed process on the operational grid."""
    return sample_fpt_batch(problem, "direct", 1, op_step, op_horizon, rng,
                            bridge).sample(0)


def fpt_reduced(problem: ProblemTriple, op_step: float, op_horizon: float, rng,
                bridge: bool = False) -> FptSample:
    """One draw of the first passage time through the reduction: the
    difference process crosses the level at operational time tau and the
    passage time is the clock evaluated at tau."""
    return sample_fpt_batch(problem, "reduced", 1, op_step, op_horizon, rng,
                            bridge).sample(0)


# ---------------------------------------------------------------------------
# two-barrier exit (upper level vs. ruin at zero), used as an MC cross-check
# for the scale-function identities; boundary must be zero
# ---------------------------------------------------------------------------

def exit_two_barrier(problem: ProblemTriple, n: int, op_step: float,
                     op_horizon: float, rng, bridge: bool = False):
    """Exit of the driver from (0, level) started at ``start``, mapped
    through the clock.  Returns (physical exit times, up flags, censored)."""
    if not problem.boundary.is_zero():
        raise ModelError("two-barrier exit requires a zero boundary")
    x = problem.x_process
    upper = problem.level
    x0 = problem.start
    if not 0.0 < x0 <= upper:
        raise ModelError("start must lie in (0, level]")
    gen = _as_generator(rng)
    sigma2 = x.sigma2
    use_bridge = bridge and sigma2 > 0

    pos = np.full(n, x0)
    phys = np.zeros(n)
    times = np.full(n, np.inf)
    up = np.zeros(n, bool)
    censored = np.ones(n, bool)
    active = np.ones(n, bool)
    n_steps = int(math.ceil(op_horizon / op_step))

    for _ in range(n_steps):
        if not active.any():
            break
        dx, jumped = _levy_increment_draws(x, op_step, n, gen)
        dsub = _sub_increment_draws(problem.time_change, np.full(n, op_step), gen)
        u_up = gen.random(n) if use_bridge else None
        u_dn = gen.random(n) if use_bridge else None
        new_pos = pos + dx
        new_phys = phys + dsub

        hit_up = active & (new_pos > upper)
        hit_dn = active & ~hit_up & (new_pos < 0.0)
        resolved = hit_up | hit_dn
        if use_bridge:
            safe = active & ~resolved & ~jumped
            with np.errstate(over="ignore", under="ignore"):
                p_up = np.exp(-2.0 * (upper - pos) * (upper - new_pos) / (sigma2 * op_step))
                p_dn = np.exp(-2.0 * pos * new_pos / (sigma2 * op_step))
            b_up = safe & (u_up < p_up)
            b_dn = safe & ~b_up & (u_dn < p_dn)
            hit_up |= b_up
            hit_dn |= b_dn
            resolved = hit_up | hit_dn
        if resolved.any():
            times[resolved] = new_phys[resolved]
            up[hit_up] = True
            censored[resolved] = False
            active &= ~resolved
        pos = new_pos
        phys = new_phys
    return times, up, censored
