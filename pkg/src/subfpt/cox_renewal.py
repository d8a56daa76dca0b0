"""The renewal risk model with heavy-tailed interarrivals, end to end.

Claims arrive as a Poisson process run through the inverse of a
subordinator clock, which makes the claim-count process a renewal process;
with a stable clock the interarrival law is Mittag-Leffler.  Claims are
exponential, capital flows in through a drift (premium rate) or a general
increasing process.  Closed forms: holding-time transform, the root R(q) of
the composite exponent, the ruin probability, and the joint transform of
(ruin time, deficit), plus an event-exact renewal Monte Carlo oracle that
is a fully independent code path from the generic samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DomainError, ModelError
from .models import (CompositeExponent, ProblemTriple, SubStable, SubordinatorModel,
                     cp_exp, drift_boundary, drifts_to_minus_infinity, phi_eval)
from .sampler import _as_generator, _sub_increment_draws
from .wiener_hopf import solve_root

__all__ = ["RiskModel", "holding_time_lt", "solve_rq", "ruin_probability",
           "joint_transform", "renewal_mc"]


@dataclass(frozen=True)
class RiskModel:
    """Claim intensity lam, exponential claim parameter p, premium rate
    delta (drift of the capital inflow), optional general capital inflow,
    and the clock driving the time change."""

    lam: float
    p: float
    delta: float = 0.0
    clock: SubordinatorModel = field(default_factory=lambda: SubordinatorModel(
        drift=0.0, jumps=SubStable(0.5)))
    capital: SubordinatorModel | None = None

    def __post_init__(self):
        if self.lam <= 0 or self.p <= 0:
            raise ModelError("lam and p must be > 0")
        if self.delta < 0:
            raise ModelError("delta must be >= 0")
        self.clock.check_time_change_admissible()

    @property
    def inflow(self) -> SubordinatorModel:
        return self.capital if self.capital is not None else drift_boundary(self.delta)

    def problem(self, a: float) -> ProblemTriple:
        return ProblemTriple(cp_exp(self.lam, self.p, "+"), self.clock,
                             self.inflow, level=a)


def holding_time_lt(model: RiskModel, u: float) -> float:
    """Laplace transform of the interarrival law: lam / (lam + phi_clock(u))."""
    if u < 0:
        raise DomainError("u must be >= 0")
    return model.lam / (model.lam + phi_eval(model.clock, u).real)


def solve_rq(model: RiskModel, q: float) -> float:
    """The root R(q) in (0, p) of lam*R/(p - R) = phi_clock(phi_inflow(R) + q)
    - phi_clock(q); for a drift-only inflow under a stable clock this is the
    displayed balance lam*R/(p-R) = (delta*R + q)**alpha.  General inflows
    route through the composite-exponent root solver."""
    if q < 0:
        raise DomainError("q must be >= 0")
    clock_j = model.clock.jumps
    drift_only = model.capital is None or model.inflow.is_pure_drift()
    if (drift_only and isinstance(clock_j, SubStable) and model.clock.drift == 0.0):
        alpha = clock_j.alpha
        lam, p, d = model.lam, model.p, model.inflow.drift
        if q == 0.0 and d == 0.0:
            raise BracketError("R(0) degenerates without capital inflow")

        def g(r):
            return lam * r / (p - r) - (d * r + q) ** alpha

        lo, hi = p * 1e-16, p * (1.0 - 1e-13)
        if q == 0.0:
            while g(lo) >= 0.0:
                lo *= 4.0
                if lo >= hi:
                    raise BracketError("failed to bracket R(0)")
        return brentq(g, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=300)
    ce = CompositeExponent(model.problem(1.0), q)
    return solve_root(ce, phi_eval(model.clock, q).real)


def ruin_probability(model: RiskModel, a: float) -> float:
    """P(ruin with initial capital a): ((p - R(0))/p) * exp(-R(0) a) when the
    net process drifts to -infinity, and exactly one otherwise."""
    if a < 0:
        raise DomainError("a must be >= 0")
    ce = CompositeExponent(model.problem(a), 0.0)
    if drifts_to_minus_infinity(ce) != "yes":
        return 1.0
    r0 = solve_rq(model, 0.0)
    return (model.p - r0) / model.p * math.exp(-r0 * a)


def joint_transform(model: RiskModel, a: float, q: float, deficit_bound: float) -> float:
    """E[exp(-q * ruin time); deficit <= y]: the time transform and the
    exponential deficit factor multiply,
    ((p - R_q)/p) exp(-R_q a) (1 - exp(-p y))."""
    if q <= 0:
        raise DomainError("q must be > 0")
    if a < 0 or deficit_bound <= 0:
        raise DomainError("need a >= 0 and deficit_bound > 0")
    rq = solve_rq(model, q)
    return ((model.p - rq) / model.p * math.exp(-rq * a)
            * (1.0 - math.exp(-model.p * deficit_bound)))


def renewal_mc(model: RiskModel, a: float, n: int, rng, max_rounds: int = 4000,
               escape: float = 40.0):
    """Event-exact renewal simulation, independent of the generic samplers:
    heavy-tailed interarrivals drawn as clock increments over exponential
    spans, exponential claims, capital inflow accrued between claims.

    A path is abandoned as safe once its surplus exceeds ``escape``/p above
    the level (the residual ruin probability is exp(-R(0) * surplus)).
    Returns (ruin times, deficits, ruined flags).
    """
    gen = _as_generator(rng)
    lam, p = model.lam, model.p
    inflow = model.inflow
    times = np.full(n, np.inf)
    deficits = np.zeros(n)
    ruined = np.zeros(n, bool)
    active = np.ones(n, bool)
    phys = np.zeros(n)
    surplus = np.full(n, float(a))
    guard = escape / p + abs(a)

    for _ in range(max_rounds):
        if not active.any():
            break
        m = int(active.sum())
        # interarrival: clock increment over an Exp(lam) operational span
        span = gen.exponential(1.0 / lam, m)
        wait = _sub_increment_draws(model.clock, span, gen)
        claim = gen.exponential(1.0 / p, m)
        inflow_inc = _sub_increment_draws(inflow, wait, gen)

        idx = np.flatnonzero(active)
        phys[idx] += wait
        surplus[idx] += inflow_inc - claim
        hit = idx[surplus[idx] < 0.0]
        if hit.size:
            times[hit] = phys[hit]
            deficits[hit] = -surplus[hit]
            ruined[hit] = True
            active[hit] = False
        safe = idx[surplus[idx] > guard]
        if safe.size:
            active[safe] = False
    return times, deficits, ruined
