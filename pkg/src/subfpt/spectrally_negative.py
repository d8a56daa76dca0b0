"""Spectrally negative theory: passage-time Laplace exponents, scale
functions, and two-sided exit identities.

For a driver without positive jumps the passage-time family over levels is a
(possibly killed) subordinator: E[exp(-q T_a); T_a finite] = exp(-phi_T(q) a)
with phi_T(q) the Bernstein inverse of the composite exponent evaluated at
the clock exponent of q.  Scale functions W/Z of the driver give two-sided
exit transforms, with the composed parameter p = phi_clock(q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ModelError
from .models import (CompositeExponent, CompoundPoissonExp, JumpsNone, LevyModel,
                     ProblemTriple, SpectrallyNegativeStable, TwoSidedStable,
                     phi_eval, psi_eval)
from .special import AccuracyReport, laplace_invert
from .wiener_hopf import solve_root

__all__ = [
    "BernsteinInverse",
    "ScaleFunctionTable",
    "passage_possible",
    "fpt_laplace_exponent",
    "survival_mass",
    "scale_w",
    "scale_functions",
    "two_sided_exit",
]


def _require_sn(model: LevyModel) -> None:
    if not model.is_spectrally_negative():
        raise ModelError("this operation needs a driver without positive jumps")


@dataclass
class BernsteinInverse:
    """The inverse bijection of u -> psi_q(-iu) on [theta_0, inf), cached."""

    exponent: CompositeExponent
    _cache: dict = field(default_factory=dict)

    def __post_init__(self):
        _require_sn(self.exponent.base.x_process)

    def __call__(self, varrho: float) -> float:
        key = float(varrho)
        if key not in self._cache:
            self._cache[key] = solve_root(self.exponent, key)
        return self._cache[key]


def passage_possible(problem: ProblemTriple) -> bool:
    """Whether upward passage has positive probability: a Gaussian part, an
    infinite-variation jump part, or positive net drift of the reduced
    process after the boundary drag."""
    x = problem.x_process
    _require_sn(x)
    if x.sigma2 > 0:
        return True
    j = x.jumps
    if isinstance(j, (SpectrallyNegativeStable, TwoSidedStable)):
        return True  # the small-jump variation is infinite
    drag = problem.boundary.drift * problem.time_change.drift
    return x.drift - drag > 0


def fpt_laplace_exponent(problem: ProblemTriple, q: float) -> float:
    """phi_T(q): E[exp(-q T_a); T_a finite] = exp(-phi_T(q) a).

    Computed as the Bernstein inverse of the composite exponent at
    phi_clock(q); the killing rate is phi_T(0), so the passage probability
    is exp(-phi_T(0) a).
    """
    if q < 0:
        raise DomainError("q must be >= 0")
    if not passage_possible(problem):
        raise ModelError("passage has probability zero for this problem")
    ce = CompositeExponent(problem, q)
    varrho = phi_eval(problem.time_change, q).real
    return solve_root(ce, varrho)


def survival_mass(problem: ProblemTriple, a: Optional[float] = None) -> float:
    """P(T_a < infinity) = exp(-phi_T(0) a)."""
    if a is None:
        a = problem.effective_level
    return math.exp(-fpt_laplace_exponent(problem, 0.0) * a)


# ---------------------------------------------------------------------------
# scale functions
# ---------------------------------------------------------------------------

@dataclass
class ScaleFunctionTable:
    """Tabulated W and Z at the composed parameter p = phi_clock(q)."""

    p: float
    x_grid: np.ndarray
    w_values: np.ndarray
    z_values: np.ndarray
    w_errors: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x,W,Z,errW\n")
            for x, w, z, e in zip(self.x_grid, self.w_values, self.z_values,
                                  self.w_errors):
                fh.write("%.17g,%.17g,%.17g,%.3g\n" % (x, w, z, e))


def _bm_scale_w(sigma2: float, drift: float, p: float, x: float) -> float:
    """Closed form for a Brownian driver: inverse of 1/(s2 u^2/2 + d u - p)."""
    if x < 0:
        return 0.0
    disc = math.sqrt(drift * drift + 2.0 * sigma2 * p)
    if disc == 0.0:
        return 2.0 * x / sigma2
    th1 = (-drift + disc) / sigma2
    th2 = (-drift - disc) / sigma2
    return (2.0 / sigma2) * (math.exp(th1 * x) - math.exp(th2 * x)) / (th1 - th2)


def _w_zero_value(x: LevyModel) -> float:
    """W(0+): zero when paths have unbounded variation, 1/drift otherwise."""
    if x.sigma2 > 0 or isinstance(x.jumps, (SpectrallyNegativeStable, TwoSidedStable)):
        return 0.0
    if x.drift <= 0:
        raise ModelError("bounded-variation driver needs positive drift for W(0+)")
    return 1.0 / x.drift


def scale_w(problem: ProblemTriple, q: float, x: float,
            target: float = 1e-10) -> AccuracyReport:
    """W at the composed parameter p = phi_clock(q), via the closed form for
    Brownian drivers and Laplace inversion of 1/(psi(-iu) - p) otherwise."""
    xm = problem.x_process
    _require_sn(xm)
    if not problem.boundary.is_zero():
        raise ModelError("scale functions require a zero boundary")
    p = phi_eval(problem.time_change, q).real
    if x < 0:
        return AccuracyReport(0.0, 0.0)
    if x == 0.0:
        return AccuracyReport(_w_zero_value(xm), 0.0)
    if isinstance(xm.jumps, JumpsNone):
        val = _bm_scale_w(xm.sigma2, xm.drift, p, x)
        return AccuracyReport(val, abs(val) * 1e-14)
    base = CompositeExponent(ProblemTriple(
        xm, problem.time_change, level=problem.level, start=problem.start), 0.0)

    def transform(s: complex) -> complex:
        return 1.0 / (psi_eval(xm, -1j * s) - p)

    abscissa = solve_root(base, p) if p > 0 else solve_root(base, 0.0)
    return laplace_invert(transform, x, target=target, abscissa=abscissa + 0.5)


def scale_functions(problem: ProblemTriple, q: float, x_grid,
                    target: float = 1e-10) -> ScaleFunctionTable:
    """Tabulate W and Z = 1 + p * int_0^x W on an increasing grid.

    Z is accumulated by composite Simpson on refined subintervals of the
    table grid, reusing the W evaluator at the refinement nodes.
    """
    x_grid = np.asarray(sorted(float(v) for v in x_grid))
    if x_grid.size == 0 or x_grid[0] < 0:
        raise DomainError("x grid must be nonnegative")
    p = phi_eval(problem.time_change, q).real
    w_vals = np.empty_like(x_grid)
    w_errs = np.empty_like(x_grid)
    for i, x in enumerate(x_grid):
        rep = scale_w(problem, q, float(x), target=target)
        w_vals[i] = rep.real
        w_errs[i] = rep.abs_error
    z_vals = np.empty_like(x_grid)
    acc = 0.0
    prev = 0.0
    for i, x in enumerate(x_grid):
        if x > prev:
            acc += _simpson_panel(problem, q, prev, float(x), target)
            prev = float(x)
        z_vals[i] = 1.0 + p * acc
    return ScaleFunctionTable(p, x_grid, w_vals, z_vals, w_errs)


def _simpson_panel(problem, q, lo, hi, target, parts: int = 4) -> float:
    xs = np.linspace(lo, hi, 2 * parts + 1)
    ws = np.array([scale_w(problem, q, float(x), target=target).real for x in xs])
    h = (hi - lo) / (2 * parts)
    return float(h / 3.0 * (ws[0] + ws[-1] + 4 * ws[1:-1:2].sum() + 2 * ws[2:-2:2].sum()))


def two_sided_exit(problem: ProblemTriple, a: float, x: float, q: float,
                   target: float = 1e-10) -> tuple[float, float]:
    """Transforms of exit from (0, a] started at x, boundary zero:

    up   = E_x[exp(-q T_a); T_a before passage below 0] = W(x)/W(a)
    down = E_x[exp(-q T-hat_0); passage below 0 first]
         = Z(x) - Z(a) W(x)/W(a)
    with W, Z at the composed parameter p = phi_clock(q).
    """
    if not 0.0 < x <= a:
        raise DomainError("need 0 < x <= a")
    if not problem.boundary.is_zero():
        raise ModelError("two-sided exit requires a zero boundary")
    p = phi_eval(problem.time_change, q).real
    wx = scale_w(problem, q, x, target=target).real
    wa = scale_w(problem, q, a, target=target).real
    up = wx / wa
    zx = 1.0 + p * _z_integral(problem, q, x, target)
    za = 1.0 + p * _z_integral(problem, q, a, target)
    down = zx - za * up
    return up, down


def _z_integral(problem, q, upper, target, parts_per_unit: int = 8) -> float:
    if upper == 0.0:
        return 0.0
    parts = max(4, int(math.ceil(upper * parts_per_unit)))
    return _simpson_panel(problem, q, 0.0, upper, target, parts=parts)
