"""Parametric model descriptors and exact evaluation of their exponents.

A driving process X is described by a Gaussian variance, a linear drift and a
jump specification with a closed-form characteristic exponent psi.  Increasing
processes (the operational clock and the moving boundary) are described by a
nonnegative drift plus a jump specification with a closed-form Laplace
exponent phi.  Everything downstream (root solvers, transforms, samplers)
consumes only these closed forms, so the model zoo is deliberately closed.

Conventions for finite-activity jumps: ``drift`` is the actual linear slope of
the path between jumps (no truncation-compensation bookkeeping).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

from .errors import DomainError, ModelError

__all__ = [
    "JumpsNone",
    "CompoundPoissonExp",
    "TwoSidedStable",
    "SpectrallyNegativeStable",
    "CustomFiniteActivity",
    "LevyModel",
    "SubJumpsNone",
    "SubStable",
    "SubTemperedStable",
    "SubCompoundPoissonExp",
    "SubZero",
    "SubordinatorModel",
    "ProblemTriple",
    "CompositeExponent",
    "psi_eval",
    "phi_eval",
    "composite_psi",
    "drifts_to_minus_infinity",
    "bm",
    "cp_exp",
    "sn_stable",
    "two_sided_stable",
    "stable_clock",
    "drift_boundary",
]

_IM_TOL = 1e-12


# ---------------------------------------------------------------------------
# jump specifications for X
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JumpsNone:
    pass


@dataclass(frozen=True)
class CompoundPoissonExp:
    """Compound Poisson jumps with Exp(jump_rate) sizes, signed by ``sign``."""

    rate: float
    jump_rate: float
    sign: str = "+"

    def __post_init__(self):
        if self.rate <= 0 or self.jump_rate <= 0:
            raise ModelError("compound Poisson needs rate > 0 and jump_rate > 0")
        if self.sign not in ("+", "-"):
            raise ModelError("sign must be '+' or '-'")


@dataclass(frozen=True)
class TwoSidedStable:
    """Strictly stable jumps, index in (0,2), positivity parameter rho."""

    index: float
    rho: float

    def __post_init__(self):
        a, r = self.index, self.rho
        if not 0.0 < a < 2.0:
            raise ModelError("stable index must lie in (0, 2)")
        if not 0.0 <= r <= 1.0:
            raise ModelError("positivity parameter must lie in [0, 1]")
        if 1.0 < a < 2.0 and a * r < a - 1.0 - 1e-12:
            raise ModelError("for index in (1,2) the positivity must satisfy index*rho >= index-1")


@dataclass(frozen=True)
class SpectrallyNegativeStable:
    """One-sided (downward) stable jumps normalized so psi(-iu) = u**index.

    index == 2 is Brownian motion with variance 2 and no jumps.
    """

    index: float

    def __post_init__(self):
        if not 1.0 < self.index <= 2.0:
            raise ModelError("spectrally negative stable index must lie in (1, 2]")


@dataclass(frozen=True)
class CustomFiniteActivity:
    """Finite-activity jumps given as (rate, distribution-tag) components.

    Supported tags: ("exp", scale_rate, sign).  Exists so that several
    compound-Poisson components can be superposed.
    """

    components: tuple = ()

    def __post_init__(self):
        for comp in self.components:
            if comp[0] != "exp" or len(comp) != 4:
                raise ModelError("unsupported jump component %r" % (comp,))
            _, rate, p, sign = comp
            if rate <= 0 or p <= 0 or sign not in ("+", "-"):
                raise ModelError("bad jump component %r" % (comp,))


JumpSpec = Union[JumpsNone, CompoundPoissonExp, TwoSidedStable,
                 SpectrallyNegativeStable, CustomFiniteActivity]


@dataclass(frozen=True)
class LevyModel:
    sigma2: float = 0.0
    drift: float = 0.0
    jumps: JumpSpec = field(default_factory=JumpsNone)

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ModelError("sigma2 must be >= 0")
        if isinstance(self.jumps, SpectrallyNegativeStable) and self.jumps.index == 2.0:
            # index-2 normalization is plain Brownian motion with variance 2
            object.__setattr__(self, "sigma2", self.sigma2 + 2.0)
            object.__setattr__(self, "jumps", JumpsNone())

    # -- structural predicates used by the solvers and samplers --

    def has_positive_jumps(self) -> bool:
        j = self.jumps
        if isinstance(j, CompoundPoissonExp):
            return j.sign == "+"
        if isinstance(j, TwoSidedStable):
            return j.rho > 0.0
        if isinstance(j, CustomFiniteActivity):
            return any(c[3] == "+" for c in j.components)
        return False

    def has_negative_jumps(self) -> bool:
        j = self.jumps
        if isinstance(j, CompoundPoissonExp):
            return j.sign == "-"
        if isinstance(j, TwoSidedStable):
            return j.rho < 1.0
        if isinstance(j, SpectrallyNegativeStable):
            return True
        if isinstance(j, CustomFiniteActivity):
            return any(c[3] == "-" for c in j.components)
        return False

    def is_spectrally_negative(self) -> bool:
        return not self.has_positive_jumps()

    def mean(self) -> float:
        """E[X_1]; +-inf where the mean does not exist is mapped to nan."""
        j = self.jumps
        m = self.drift
        if isinstance(j, CompoundPoissonExp):
            m += (1.0 if j.sign == "+" else -1.0) * j.rate / j.jump_rate
        elif isinstance(j, CustomFiniteActivity):
            for _, rate, p, sign in j.components:
                m += (1.0 if sign == "+" else -1.0) * rate / p
        elif isinstance(j, TwoSidedStable):
            if j.index <= 1.0:
                return math.nan
            # strictly stable with index > 1 is centered
        elif isinstance(j, SpectrallyNegativeStable):
            pass  # psi(-iu) = u**a has zero mean
        return m

    def negated(self) -> "LevyModel":
        """The model of -X."""
        j = self.jumps
        if isinstance(j, JumpsNone):
            nj: JumpSpec = j
        elif isinstance(j, CompoundPoissonExp):
            nj = CompoundPoissonExp(j.rate, j.jump_rate, "-" if j.sign == "+" else "+")
        elif isinstance(j, TwoSidedStable):
            nj = TwoSidedStable(j.index, 1.0 - j.rho)
        elif isinstance(j, SpectrallyNegativeStable):
            nj = TwoSidedStable(j.index, 1.0 - 1.0 / j.index)
        else:
            nj = CustomFiniteActivity(tuple(
                (tag, rate, p, "-" if s == "+" else "+") for tag, rate, p, s in j.components))
        return LevyModel(self.sigma2, -self.drift, nj)


# ---------------------------------------------------------------------------
# jump specifications for increasing processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubJumpsNone:
    pass


@dataclass(frozen=True)
class SubZero:
    pass


@dataclass(frozen=True)
class SubStable:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ModelError("stable clock index must lie in (0, 1)")


@dataclass(frozen=True)
class SubTemperedStable:
    alpha: float
    theta: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ModelError("tempered stable index must lie in (0, 1)")
        if self.theta <= 0:
            raise ModelError("tempering parameter must be > 0")


@dataclass(frozen=True)
class SubCompoundPoissonExp:
    rate: float
    mean: float

    def __post_init__(self):
        if self.rate <= 0 or self.mean <= 0:
            raise ModelError("compound Poisson needs rate > 0 and mean > 0")


SubJumpSpec = Union[SubJumpsNone, SubZero, SubStable, SubTemperedStable,
                    SubCompoundPoissonExp]


@dataclass(frozen=True)
class SubordinatorModel:
    drift: float = 0.0
    jumps: SubJumpSpec = field(default_factory=SubZero)

    def __post_init__(self):
        if self.drift < 0:
            raise ModelError("subordinator drift must be >= 0")

    def is_zero(self) -> bool:
        return self.drift == 0.0 and isinstance(self.jumps, (SubZero, SubJumpsNone))

    def is_pure_drift(self) -> bool:
        return isinstance(self.jumps, (SubZero, SubJumpsNone))

    def infinite_activity(self) -> bool:
        return isinstance(self.jumps, (SubStable, SubTemperedStable))

    def check_time_change_admissible(self) -> None:
        """A time-change clock must have strictly increasing paths:
        positive drift or an infinite-activity jump part."""
        if self.drift > 0 or self.infinite_activity():
            return
        raise ModelError(
            "time-change subordinator must have drift > 0 or infinitely many jumps")

    def mean_rate(self) -> float:
        """phi'(0+); may be +inf (infinite-slope at the origin)."""
        j = self.jumps
        m = self.drift
        if isinstance(j, SubStable):
            return math.inf
        if isinstance(j, SubTemperedStable):
            m += j.alpha * j.theta ** (j.alpha - 1.0)
        elif isinstance(j, SubCompoundPoissonExp):
            m += j.rate * j.mean
        return m


# ---------------------------------------------------------------------------
# problem containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemTriple:
    """One first-passage problem: X timed by the inverse of the clock,
    crossing the moving level ``level + boundary_t``, started at ``start``."""

    x_process: LevyModel
    time_change: SubordinatorModel
    boundary: SubordinatorModel = field(default_factory=SubordinatorModel)
    level: float = 1.0
    start: float = 0.0

    def __post_init__(self):
        if self.level < 0:
            raise ModelError("level must be >= 0")
        self.time_change.check_time_change_admissible()

    @property
    def effective_level(self) -> float:
        # spatial homogeneity: starting at x against level a == starting at 0
        # against level a - x
        return self.level - self.start


@dataclass(frozen=True)
class CompositeExponent:
    """psi_q(z) = psi(z) - phi_clock(phi_boundary(iz) + q) + phi_clock(q)."""

    base: ProblemTriple
    q: float = 0.0

    def __post_init__(self):
        if self.q < 0:
            raise ModelError("q must be >= 0")

    def at(self, z: complex) -> complex:
        return composite_psi(self, z)

    def along_negative_imag(self, u: float) -> float:
        """psi_q(-iu) for real u >= 0; real-valued for admissible models."""
        val = composite_psi(self, complex(0.0, -u))
        if abs(val.imag) > _IM_TOL * max(1.0, abs(val.real)):
            raise DomainError("psi_q(-iu) is not real for this model at u=%g" % u)
        return val.real


# ---------------------------------------------------------------------------
# exponent evaluation
# ---------------------------------------------------------------------------

def _check_strip(model: LevyModel, z: complex) -> None:
    j = model.jumps
    y = z.imag
    if isinstance(j, JumpsNone):
        return
    if isinstance(j, CompoundPoissonExp):
        if j.sign == "+" and y <= -j.jump_rate:
            raise DomainError("Im(z) must exceed -jump_rate for positive exponential jumps")
        if j.sign == "-" and y >= j.jump_rate:
            raise DomainError("Im(z) must be below jump_rate for negative exponential jumps")
        return
    if isinstance(j, CustomFiniteActivity):
        for _, _, p, sign in j.components:
            if sign == "+" and y <= -p:
                raise DomainError("Im(z) outside the strip of a positive jump component")
            if sign == "-" and y >= p:
                raise DomainError("Im(z) outside the strip of a negative jump component")
        return
    if isinstance(j, TwoSidedStable):
        if abs(y) > _IM_TOL * max(1.0, abs(z.real)) and not (
                j.rho == 1.0 and y >= 0) and not (j.rho == 0.0 and y <= 0):
            raise DomainError("two-sided stable exponent is defined on the real line only")
        return
    if isinstance(j, SpectrallyNegativeStable):
        if y > _IM_TOL * max(1.0, abs(z.real)):
            raise DomainError("spectrally negative stable exponent needs Im(z) <= 0")


def psi_eval(model: LevyModel, z: complex) -> complex:
    """Characteristic exponent psi(z) = log E[exp(izX_1)], closed form per spec."""
    z = complex(z)
    _check_strip(model, z)
    out = -0.5 * model.sigma2 * z * z + 1j * model.drift * z
    j = model.jumps
    if isinstance(j, CompoundPoissonExp):
        if j.sign == "+":
            out += 1j * j.rate * z / (j.jump_rate - 1j * z)
        else:
            out += -1j * j.rate * z / (j.jump_rate + 1j * z)
    elif isinstance(j, CustomFiniteActivity):
        for _, rate, p, sign in j.components:
            if sign == "+":
                out += 1j * rate * z / (p - 1j * z)
            else:
                out += -1j * rate * z / (p + 1j * z)
    elif isinstance(j, SpectrallyNegativeStable):
        # analytic extension with psi(-iu) = u**index on the lower half-plane
        if z != 0:
            out += (1j * z) ** j.index
    elif isinstance(j, TwoSidedStable):
        if z.real != 0 or z.imag != 0:
            if abs(z.imag) <= _IM_TOL * max(1.0, abs(z.real)) or z.imag == 0:
                x = z.real
                s = 1.0 if x > 0 else -1.0
                out += -abs(x) ** j.index * cmath.exp(
                    1j * math.pi * j.index * (0.5 - j.rho) * s)
            elif j.rho == 1.0:
                out += -((-1j * z) ** j.index)  # one-sided positive: subordinator form
            else:
                out += -((1j * z) ** j.index)   # one-sided negative
    return out


def phi_eval(model: SubordinatorModel, u: complex) -> complex:
    """Laplace exponent phi(u) = -log E[exp(-u S_1)] for Re(u) >= 0."""
    u = complex(u)
    if u.real < -_IM_TOL:
        raise DomainError("phi is defined for Re(u) >= 0")
    out = model.drift * u
    j = model.jumps
    if isinstance(j, SubStable):
        if u != 0:
            out += u ** j.alpha
    elif isinstance(j, SubTemperedStable):
        out += (u + j.theta) ** j.alpha - j.theta ** j.alpha
    elif isinstance(j, SubCompoundPoissonExp):
        out += j.rate * u * j.mean / (u * j.mean + 1.0)
    if abs(u.imag) == 0.0:
        return complex(out.real, 0.0)
    return out


def composite_psi(ce: CompositeExponent, z: complex) -> complex:
    """psi_q(z) = psi(z) - phi_clock(phi_boundary(iz) + q) + phi_clock(q)."""
    z = complex(z)
    pb = ce.base
    inner = phi_eval(pb.boundary, 1j * z) + ce.q
    if inner.real < -_IM_TOL:
        raise DomainError("phi_boundary(iz) + q left of the admissible half-plane")
    return (psi_eval(pb.x_process, z)
            - phi_eval(pb.time_change, inner)
            + phi_eval(pb.time_change, ce.q))


def drifts_to_minus_infinity(ce: CompositeExponent) -> str:
    """Long-run behaviour of the reduced process X_t - boundary(clock_t).

    Returns 'yes' if it drifts to -inf, otherwise 'no' (a centered Levy
    process oscillates, so zero mean is 'no').  The mean is
    E[X_1] - phi'_clock(0) * phi'_boundary(0) with the convention inf*0 = 0.
    """
    pb = ce.base
    mx = pb.x_process.mean()
    rc = pb.time_change.mean_rate()
    rb = pb.boundary.mean_rate()
    if math.isnan(mx):
        # heavy two-sided stable: oscillates regardless of the drag
        return "no"
    if math.isinf(rc):
        drag = 0.0 if rb == 0.0 else math.inf
    else:
        drag = rc * rb
    if math.isinf(drag):
        return "yes"
    m = mx - drag
    if m < 0:
        return "yes"
    return "no"


# ---------------------------------------------------------------------------
# convenience constructors
# ---------------------------------------------------------------------------

def bm(sigma2: float = 1.0, drift: float = 0.0) -> LevyModel:
    return LevyModel(sigma2=sigma2, drift=drift)


def cp_exp(rate: float, jump_rate: float, sign: str = "+",
           drift: float = 0.0, sigma2: float = 0.0) -> LevyModel:
    return LevyModel(sigma2=sigma2, drift=drift,
                     jumps=CompoundPoissonExp(rate, jump_rate, sign))


def sn_stable(index: float) -> LevyModel:
    return LevyModel(jumps=SpectrallyNegativeStable(index))


def two_sided_stable(index: float, rho: float) -> LevyModel:
    return LevyModel(jumps=TwoSidedStable(index, rho))


def stable_clock(alpha: float) -> SubordinatorModel:
    return SubordinatorModel(drift=0.0, jumps=SubStable(alpha))


def drift_boundary(delta: float) -> SubordinatorModel:
    return SubordinatorModel(drift=delta, jumps=SubZero())
