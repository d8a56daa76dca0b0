"""Named invariant checks behind the command-line ``selftest`` subcommand.

Each check is small enough that the whole suite finishes within minutes on
one core; thresholds mirror the package's property tests at reduced Monte
Carlo scale.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import loggamma

from . import cox_renewal as cr
from . import fractional as fr
from . import models as md
from . import montecarlo as mc
from . import sampler as sp
from . import special as sf
from . import spectrally_negative as sn
from . import wiener_hopf as wh

__all__ = ["run_selftest", "CHECKS"]


def _check_exponents():
    rng = np.random.default_rng(0)
    zoo = [md.bm(1.0, 0.3), md.cp_exp(1.0, 2.0, "+"), md.cp_exp(0.5, 1.0, "-"),
           md.sn_stable(1.6), md.two_sided_stable(1.2, 0.6)]
    for m in zoo:
        assert abs(md.psi_eval(m, 0.0)) < 1e-14
        for _ in range(10):
            z = rng.uniform(0.05, 3.0)
            v, w = md.psi_eval(m, z), md.psi_eval(m, -z)
            assert abs(v - w.conjugate()) < 1e-12 * max(1.0, abs(v))
    subs = [md.stable_clock(0.5), md.SubordinatorModel(0.2, md.SubTemperedStable(0.7, 1.0)),
            md.SubordinatorModel(1.0, md.SubCompoundPoissonExp(2.0, 0.5))]
    for s in subs:
        assert abs(md.phi_eval(s, 0.0)) < 1e-14
        us = np.sort(rng.uniform(0.01, 5.0, 3))
        vals = [md.phi_eval(s, u).real for u in us]
        assert vals[0] > 0 and vals[0] <= vals[1] <= vals[2]
        slope1 = (vals[1] - vals[0]) / (us[1] - us[0])
        slope2 = (vals[2] - vals[1]) / (us[2] - us[1])
        assert slope2 <= slope1 + 1e-12


def _check_gamma_reflection():
    rng = np.random.default_rng(1)
    for _ in range(60):
        z = complex(rng.uniform(0.05, 0.95), rng.uniform(-20, 20))
        lhs = cmath.exp(sf.log_gamma(z) + sf.log_gamma(1 - z))
        rhs = math.pi / cmath.sin(math.pi * z)
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def _check_barnes_recurrences():
    rng = np.random.default_rng(2)
    for tau in (0.5, 1 / 1.2, 1 / 1.6, 1.0):
        for _ in range(12):
            z = complex(rng.uniform(0.05, 8.0), rng.uniform(-8, 8))
            r1 = sf.barnes_g(z + 1, tau) - sf.barnes_g(z, tau) - complex(loggamma(z / tau))
            r2 = (sf.barnes_g(z + tau, tau) - sf.barnes_g(z, tau)
                  - (tau - 1) / 2 * math.log(2 * math.pi)
                  - (0.5 - z) * math.log(tau) - complex(loggamma(z)))
            assert abs(r1) < 1e-9 and abs(r2) < 1e-9


def _check_mittag_leffler():
    assert abs(sf.mittag_leffler(0.7, 0.0).value - 1.0) < 1e-14
    assert abs(sf.mittag_leffler(1.0, -1.0).value - math.exp(-1)) < 1e-14
    v = sf.mittag_leffler(0.5, -1.0).value
    assert abs(v - sf.ml_halforder_closed_form(-1.0)) < 1e-10
    for alpha in (0.3, 0.5, 0.8):
        xs = np.linspace(0.0, 40.0, 30)
        vals = np.array([sf.mittag_leffler(alpha, -x).value for x in xs])
        assert np.all(np.diff(vals) < 0) and np.all(np.diff(vals, 2) > -1e-12)


def _check_laplace_roundtrip():
    pairs = [
        (lambda s: 1 / s ** 2, lambda t: t, 0.0),
        (lambda s: 1 / (s + 2), lambda t: math.exp(-2 * t), 0.0),
        (lambda s: 1 / (s * s / 2 - 1), lambda t: math.sqrt(2) * math.sinh(math.sqrt(2) * t),
         math.sqrt(2)),
        (lambda s: s / (s * s + 1), lambda t: math.cos(t), 0.0),
        (lambda s: 1 / np.sqrt(s), lambda t: 1 / math.sqrt(math.pi * t), 0.0),
    ]
    for F, f, s0 in pairs:
        for t in (0.5, 1.5):
            rep = sf.laplace_invert(F, t, target=1e-9, abscissa=s0)
            assert abs(rep.value - f(t)) < 1e-8


def _check_root_solver():
    m = cr.RiskModel(1.0, 1.0, 1.0)
    assert abs(cr.solve_rq(m, 0.0) - (3 - math.sqrt(5)) / 2) < 1e-12
    prob = md.ProblemTriple(md.sn_stable(1.6), md.stable_clock(0.8), level=1.0)
    assert abs(sn.fpt_laplace_exponent(prob, 4.0) - 2.0) < 1e-10


def _check_wh_identities():
    prob = cr.RiskModel(1.0, 1.0, 1.0).problem(1.0)
    rhs = wh.composite_rhs_q0(prob, 1.0, 0.0)
    assert abs(rhs - (1.0 - 0.3819660112501051) / (1.0 + 0.3819660112501051)) < 1e-10
    # factorization through the driver exponent on a real-z grid
    q = 0.7
    varrho = md.phi_eval(prob.time_change, q).real
    f = wh.solve_factor(prob, q, varrho)
    ce = md.CompositeExponent(prob, q)
    for z in np.linspace(-4.0, 4.0, 17):
        if z == 0:
            continue
        total = varrho / (varrho - md.composite_psi(ce, z))
        phat = total / wh.wh_factor(f, z)
        assert abs(phat) <= 1.0 + 1e-9
        assert abs(wh.wh_factor(f, z) * phat - total) < 1e-10


def _check_scale_functions():
    prob = md.ProblemTriple(md.bm(1.0), md.stable_clock(0.5), level=2.0, start=1.0)
    assert abs(sn.scale_w(prob, 0.0, 1.0).real - 2.0) < 1e-12
    w11 = sn.scale_w(prob, 1.0, 1.0).real
    assert abs(w11 - math.sqrt(2) * math.sinh(math.sqrt(2))) < 1e-8
    up, down = sn.two_sided_exit(prob, 2.0, 1.0, 0.0)
    assert abs(up - 0.5) < 1e-9 and 0.0 <= down <= 1.0


def _check_sampler_reproducibility():
    prob = md.ProblemTriple(md.bm(1.0), md.stable_clock(0.5), level=1.0)
    b1 = sp.sample_fpt_batch(prob, "reduced", 200, 1e-2, 5.0, sp.RngStream(9), bridge=True)
    b2 = sp.sample_fpt_batch(prob, "reduced", 200, 1e-2, 5.0, sp.RngStream(9), bridge=True)
    assert np.array_equal(b1.times, b2.times)
    assert np.array_equal(b1.overshoots, b2.overshoots)


def _check_ensemble_determinism():
    prob = cr.RiskModel(1.0, 1.0, 1.0).problem(1.0)
    outs = [mc.run_ensemble(prob, "reduced", 600, seed=5, workers=w,
                            op_horizon=1e4) for w in (1, 4)]
    assert np.array_equal(outs[0].times, outs[1].times)


def _check_fpt_transform():
    prob = md.ProblemTriple(md.bm(1.0), md.stable_clock(0.5), level=1.0)
    batch = sp.sample_fpt_batch(prob, "reduced", 8000, 2e-3, 20.0,
                                sp.RngStream(21), bridge=True)
    est = mc.estimate_lt(batch, 1.0, 0.0)
    exact = math.exp(-math.sqrt(2))
    assert abs(est.value - exact) <= 3.0 * est.std_error + 0.01 * exact


def _check_ruin_mc():
    m = cr.RiskModel(1.0, 1.0, 1.0)
    t, d, r = cr.renewal_mc(m, 1.0, 20000, sp.RngStream(13))
    pr = float(r.mean())
    se = math.sqrt(pr * (1 - pr) / len(r))
    assert abs(pr - cr.ruin_probability(m, 1.0)) <= 3.5 * se


def _check_fractional_density():
    fp = fr.bm_drift_problem(1.0, 1.0, 0.5)
    r1 = fr.density_t0(fp, 2.0)
    r2 = fr.density_t0(fp, 2.0, line=sf.MellinLine(0.1, 40.0, 1024))
    assert abs(r1.value - r2.value) <= r1.abs_error + r2.abs_error
    assert r1.value > 0


def _check_sn_series():
    spar = fr.StableParams(1.6, 1 / 1.6, 1.0)
    s = fr.sn_stable_series_density(1.6, 0.5, 5.0)
    m = fr.stable_hat_t0_density(spar, 0.5, 5.0)
    assert abs(s.value - m.value) <= s.abs_error + m.abs_error + 1e-5


CHECKS = [
    ("exponent-identities", _check_exponents),
    ("gamma-reflection", _check_gamma_reflection),
    ("barnes-recurrences", _check_barnes_recurrences),
    ("mittag-leffler", _check_mittag_leffler),
    ("laplace-roundtrip", _check_laplace_roundtrip),
    ("root-solver", _check_root_solver),
    ("wiener-hopf-identities", _check_wh_identities),
    ("scale-functions", _check_scale_functions),
    ("sampler-reproducibility", _check_sampler_reproducibility),
    ("ensemble-determinism", _check_ensemble_determinism),
    ("passage-transform-mc", _check_fpt_transform),
    ("ruin-mc", _check_ruin_mc),
    ("fractional-density", _check_fractional_density),
    ("sn-stable-series", _check_sn_series),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            fn()
            out("PASS %s" % name)
        except Exception as exc:  # report and keep going
            ok = False
            out("FAIL %s: %s" % (name, exc))
    return ok
