"""Wiener-Hopf factor evaluation and the composite factorization identity.

Two tractable factor families are implemented:

* ``spectrally_negative`` - the positive factor is phi/(phi - iz) where phi
  is the right inverse of u -> psi_q(-iu);
* ``lewis_mordecki_exp`` - drivers whose positive jumps are compound Poisson
  with exponential sizes; the positive factor is
  ((u + p)/p) * (R / (u + R)) at z = iu, with R the unique root of
  psi_q(-iR) = rho in (0, p).

``composite_rhs`` evaluates the joint transform of the passage time over an
independent exponential level and the overshoot at that passage, entirely
from the solved factor; ``composite_rhs_q0`` is its q -> 0 limit, defined
when the reduced process drifts to -infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BracketError, DomainError, ModelError
from .models import (CompositeExponent, CompoundPoissonExp, ProblemTriple,
                     drifts_to_minus_infinity, phi_eval)

__all__ = ["WhFactor", "solve_root", "wh_factor", "solve_factor",
           "composite_rhs", "composite_rhs_q0"]

_ROOT_RTOL = 1e-14


def _family(problem: ProblemTriple) -> str:
    x = problem.x_process
    if x.is_spectrally_negative():
        return "spectrally_negative"
    if isinstance(x.jumps, CompoundPoissonExp) and x.jumps.sign == "+":
        return "lewis_mordecki_exp"
    raise ModelError(
        "no closed Wiener-Hopf factor for this driver (need a spectrally "
        "negative model or exponential positive jumps)")


@dataclass(frozen=True)
class WhFactor:
    """A solved positive Wiener-Hopf factor of the composite exponent."""

    family: str
    q: float
    varrho: float
    root: float            # phi(varrho) for SN, R(varrho) for LM
    jump_rate: float = math.nan  # p of the exponential positive jumps (LM)


def _mean_of_reduced(ce: CompositeExponent) -> float:
    pb = ce.base
    mx = pb.x_process.mean()
    rc = pb.time_change.mean_rate()
    rb = pb.boundary.mean_rate()
    if math.isnan(mx):
        return math.nan
    drag = 0.0 if rb == 0.0 else (math.inf if math.isinf(rc) else rc * rb)
    return -math.inf if math.isinf(drag) else mx - drag


def solve_root(ce: CompositeExponent, varrho: float) -> float:
    """u* >= 0 with psi_q(-iu*) = varrho, to 1e-12 * max(1, varrho).

    For the spectrally negative family this is the Bernstein inverse
    evaluated at varrho (the largest root when varrho = 0); for the
    exponential-positive-jump family the root lies in (0, p).
    """
    if varrho < 0:
        raise DomainError("varrho must be >= 0")
    fam = _family(ce.base)
    f = ce.along_negative_imag

    if fam == "lewis_mordecki_exp":
        p = ce.base.x_process.jumps.jump_rate  # type: ignore[union-attr]
        if varrho == 0.0 and ce.q == 0.0 and _mean_of_reduced(ce) >= 0.0:
            raise BracketError(
                "no positive root at varrho = 0: the reduced process does "
                "not drift to -infinity, the root degenerates at the jump rate")
        hi = p * (1.0 - 1e-13)
        lo = p * 1e-16
        g = lambda u: f(u) - varrho
        if varrho == 0.0:
            # f(0) = 0; march right until the root is strictly bracketed
            while g(lo) >= 0.0:
                lo *= 4.0
                if lo >= hi:
                    raise BracketError("failed to bracket the zero-level root")
        u = brentq(g, lo, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=300)
        return _polish(g, u, lo, hi, varrho)

    # spectrally negative: f is convex with f(0) = 0, f(u) -> +inf
    if varrho == 0.0:
        m = _mean_of_reduced(ce)
        if not (m < 0.0):
            return 0.0
    hi = 1.0
    for _ in range(300):
        if f(hi) > varrho:
            break
        hi *= 2.0
    else:
        raise BracketError("psi_q(-iu) never exceeded varrho while doubling")
    lo = 0.0
    if varrho == 0.0:
        # locate a strictly negative point right of the origin
        probe = hi
        while probe > 1e-280:
            probe /= 2.0
            if f(probe) < 0.0:
                lo = probe
                break
        else:
            return 0.0
    g = lambda u: f(u) - varrho
    u = brentq(g, lo, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=300)
    return _polish(g, u, lo, hi, varrho)


def _polish(g, u: float, lo: float, hi: float, varrho: float) -> float:
    tol = 1e-12 * max(1.0, varrho)
    ru = g(u)
    if abs(ru) <= tol:
        return u
    # secant refinement, safeguarded inside the bracket
    h = max(abs(u), 1.0) * 1e-7
    for _ in range(8):
        d = (g(u + h) - ru) / h
        if d == 0.0:
            break
        step = ru / d
        cand = min(max(u - step, lo), hi)
        rc = g(cand)
        if abs(rc) >= abs(ru):
            break
        u, ru = cand, rc
        if abs(ru) <= tol:
            return u
    if abs(ru) <= tol:
        return u
    raise BracketError("root residual %.3e above tolerance %.3e" % (abs(ru), tol))


def solve_factor(problem: ProblemTriple, q: float, varrho: float) -> WhFactor:
    ce = CompositeExponent(problem, q)
    fam = _family(problem)
    root = solve_root(ce, varrho)
    p = math.nan
    if fam == "lewis_mordecki_exp":
        p = problem.x_process.jumps.jump_rate  # type: ignore[union-attr]
    return WhFactor(fam, q, varrho, root, p)


def wh_factor(f: WhFactor, z: complex) -> complex:
    """The positive factor Phi(varrho; z), analytic on Im(z) >= 0, Phi = 1 at 0."""
    z = complex(z)
    if z.imag < -1e-12:
        raise DomainError("the positive factor needs Im(z) >= 0")
    if z == 0:
        return 1.0 + 0.0j
    if f.family == "spectrally_negative":
        return f.root / (f.root - 1j * z)
    u = -1j * z  # z = iu on the positive imaginary axis
    return ((u + f.jump_rate) / f.jump_rate) * (f.root / (u + f.root))


def composite_rhs(problem: ProblemTriple, q: float, p: float, v: float) -> float:
    """E[exp(-q T - v overshoot); T finite] for an Exp(p) level:
    (p/(p - v)) * (1 - Phi(phi_clock(q); ip) / Phi(phi_clock(q); iv)).
    """
    if q <= 0 or p <= 0:
        raise DomainError("q and p must be > 0")
    if v < 0 or v == p:
        raise DomainError("v must be >= 0 and differ from p")
    varrho = phi_eval(problem.time_change, q).real
    f = solve_factor(problem, q, varrho)
    num = wh_factor(f, 1j * p)
    den = wh_factor(f, 1j * v)
    return float((p / (p - v)) * (1.0 - num / den).real)


def composite_rhs_q0(problem: ProblemTriple, p: float, v: float) -> float:
    """The q -> 0 limit of composite_rhs, using the limiting factor at
    varrho = 0.  Defined only when the reduced process drifts to -infinity;
    otherwise the passage time is finite almost surely and the transform
    limit carries no defect."""
    if p <= 0:
        raise DomainError("p must be > 0")
    if v < 0 or v == p:
        raise DomainError("v must be >= 0 and differ from p")
    ce = CompositeExponent(problem, 0.0)
    if drifts_to_minus_infinity(ce) != "yes":
        raise ModelError(
            "the reduced process does not drift to -infinity: passage is "
            "almost sure and the q=0 factor limit is degenerate")
    f = solve_factor(problem, 0.0, 0.0)
    num = wh_factor(f, 1j * p)
    den = wh_factor(f, 1j * v)
    return float((p / (p - v)) * (1.0 - num / den).real)
