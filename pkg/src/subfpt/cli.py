"""Command-line surface.

Problems are described by a JSON document with ``kind``-discriminated model
specs; every CSV artifact starts with a comment line carrying the config
hash and seed so runs can be audited and diffed.  Exit codes: 0 success,
2 validation error, 3 numerical non-convergence (or failed selftest).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError, ModelError
from .models import (CompoundPoissonExp, LevyModel, ProblemTriple,
                     SpectrallyNegativeStable, SubCompoundPoissonExp, SubJumpsNone,
                     SubordinatorModel, SubStable, SubTemperedStable, SubZero,
                     TwoSidedStable, phi_eval)
from . import cox_renewal, fractional, montecarlo, spectrally_negative, wiener_hopf
from .sampler import RngStream, simulate_subordinator
from .selftest import run_selftest

__all__ = ["main", "load_problem"]


class ConfigError(ValueError):
    pass


def _take(spec: dict, where: str, required: tuple, optional: dict):
    unknown = set(spec) - {"kind"} - set(required) - set(optional)
    if unknown:
        raise ConfigError("%s: unknown keys %s" % (where, sorted(unknown)))
    missing = [k for k in required if k not in spec]
    if missing:
        raise ConfigError("%s: missing keys %s" % (where, missing))
    out = {k: spec[k] for k in required}
    for k, dflt in optional.items():
        out[k] = spec.get(k, dflt)
    return out


def _levy_from_spec(spec: dict, where: str) -> LevyModel:
    kind = spec.get("kind")
    if kind == "bm":
        v = _take(spec, where, (), {"sigma2": 1.0, "drift": 0.0})
        return LevyModel(v["sigma2"], v["drift"])
    if kind == "cp_exp":
        v = _take(spec, where, ("rate", "jump_rate"),
                  {"sign": "+", "drift": 0.0, "sigma2": 0.0})
        return LevyModel(v["sigma2"], v["drift"],
                         CompoundPoissonExp(v["rate"], v["jump_rate"], v["sign"]))
    if kind == "sn_stable":
        v = _take(spec, where, ("index",), {})
        return LevyModel(jumps=SpectrallyNegativeStable(v["index"]))
    if kind == "stable":
        v = _take(spec, where, ("index", "rho"), {})
        return LevyModel(jumps=TwoSidedStable(v["index"], v["rho"]))
    raise ConfigError("%s: unknown kind %r" % (where, kind))


def _sub_from_spec(spec: dict, where: str) -> SubordinatorModel:
    kind = spec.get("kind")
    if kind == "drift":
        v = _take(spec, where, ("delta",), {})
        return SubordinatorModel(v["delta"], SubZero())
    if kind == "stable":
        v = _take(spec, where, ("alpha",), {"drift": 0.0})
        return SubordinatorModel(v["drift"], SubStable(v["alpha"]))
    if kind == "tempered_stable":
        v = _take(spec, where, ("alpha", "theta"), {"drift": 0.0})
        return SubordinatorModel(v["drift"], SubTemperedStable(v["alpha"], v["theta"]))
    if kind == "cp_exp":
        v = _take(spec, where, ("rate", "mean"), {"drift": 0.0})
        return SubordinatorModel(v["drift"], SubCompoundPoissonExp(v["rate"], v["mean"]))
    raise ConfigError("%s: unknown kind %r" % (where, kind))


def load_problem(doc: dict) -> ProblemTriple:
    unknown = set(doc) - {"x_process", "time_change", "boundary", "level", "start"}
    if unknown:
        raise ConfigError("config: unknown keys %s" % sorted(unknown))
    for key in ("x_process", "time_change"):
        if key not in doc:
            raise ConfigError("config: missing %r" % key)
    x = _levy_from_spec(doc["x_process"], "x_process")
    clock = _sub_from_spec(doc["time_change"], "time_change")
    bnd = (_sub_from_spec(doc["boundary"], "boundary")
           if "boundary" in doc else SubordinatorModel(0.0, SubZero()))
    return ProblemTriple(x, clock, bnd, float(doc.get("level", 1.0)),
                         float(doc.get("start", 0.0)))


def _read_config(path: str) -> tuple[dict, str]:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s: line %d column %d: %s"
                          % (path, exc.lineno, exc.colno, exc.msg)) from exc
    digest = hashlib.sha256(
        json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]
    return doc, digest


def _open_out(path: str, digest: str, seed, header: str):
    fh = open(path, "w")
    fh.write("# config=%s seed=%s\n" % (digest, seed))
    fh.write(header + "\n")
    return fh


def _parse_grid(text: str) -> np.ndarray:
    # accepts "a:b:n" or a comma list
    if ":" in text:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    return np.array([float(v) for v in text.split(",")])


def _default_workers() -> int:
    env = os.environ.get("SUBFPT_THREADS")
    return int(env) if env else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subfpt", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="problem JSON")
        p.add_argument("--out", required=True, help="output CSV")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate", help="first-passage sample batches or clock paths")
    common(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--method", choices=["direct", "reduced"], default="reduced")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--bridge", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--paths", action="store_true",
                   help="dump one clock path instead of passage samples")

    p = sub.add_parser("fpt-lt", help="passage-time Laplace exponent table")
    common(p)
    p.add_argument("--q-grid", default="0:4:17")

    p = sub.add_parser("wh-check", help="factor identity vs Monte Carlo")
    common(p)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=1e4)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("scale-fn", help="W/Z scale-function table")
    common(p)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--x-grid", default="0:3:31")

    p = sub.add_parser("density", help="passage density under a stable clock")
    common(p)
    p.add_argument("--t-grid", default="0.1:10:40")
    p.add_argument("--order", type=int, default=0)

    p = sub.add_parser("ruin", help="ruin-probability sweep")
    common(p)
    p.add_argument("--a-grid", default="0:5:26")

    p = sub.add_parser("selftest", help="run the invariant suite")
    return ap


def _cmd_simulate(args, doc, digest) -> int:
    problem = load_problem(doc)
    if args.paths:
        rec = simulate_subordinator(problem.time_change, args.horizon,
                                    max(args.step, 1e-4), RngStream(args.seed))
        with _open_out(args.out, digest, args.seed, "t,value,kind") as fh:
            for t, v in zip(rec.times, rec.values):
                fh.write("%.17g,%.17g,%s\n" % (t, v, rec.kind))
        return 0
    workers = args.workers if args.workers is not None else _default_workers()
    batch = montecarlo.run_ensemble(problem, args.method, args.n, args.seed,
                                    workers=workers, op_step=args.step,
                                    op_horizon=args.horizon, bridge=args.bridge)
    with _open_out(args.out, digest, args.seed,
                   "time,overshoot,finite,censored") as fh:
        for t, o, f, c in zip(batch.times, batch.overshoots, batch.finite,
                              batch.censored):
            fh.write("%.17g,%.17g,%d,%d\n" % (t, o, int(f), int(c)))
    return 0


def _cmd_fpt_lt(args, doc, digest) -> int:
    problem = load_problem(doc)
    qs = _parse_grid(args.q_grid)
    a = problem.effective_level
    with _open_out(args.out, digest, args.seed, "q,phi_T,transform") as fh:
        for q in qs:
            phi_t = spectrally_negative.fpt_laplace_exponent(problem, float(q))
            fh.write("%.17g,%.17g,%.17g\n" % (q, phi_t, math.exp(-phi_t * a)))
    return 0


def _cmd_wh_check(args, doc, digest) -> int:
    problem = load_problem(doc)
    analytic = wiener_hopf.composite_rhs(problem, args.q, args.p, args.v)
    est, se = montecarlo.estimate_composite_lhs(
        problem, args.q, args.p, args.v, args.n, args.seed,
        op_step=args.step, op_horizon=args.horizon)
    with _open_out(args.out, digest, args.seed, "q,p,v,analytic,mc,mc_se,z") as fh:
        fh.write("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.4g\n"
                 % (args.q, args.p, args.v, analytic, est, se,
                    (est - analytic) / se if se else 0.0))
    return 0


def _cmd_scale_fn(args, doc, digest) -> int:
    problem = load_problem(doc)
    xs = _parse_grid(args.x_grid)
    table = spectrally_negative.scale_functions(problem, args.q, xs)
    with _open_out(args.out, digest, args.seed, "x,W,Z,errW") as fh:
        for x, w, z, e in zip(table.x_grid, table.w_values, table.z_values,
                              table.w_errors):
            fh.write("%.17g,%.17g,%.17g,%.3g\n" % (x, w, z, e))
    return 0


def _cmd_density(args, doc, digest) -> int:
    problem = load_problem(doc)
    x = problem.x_process
    clock = problem.time_change
    if (x.sigma2 <= 0 or x.drift <= 0 or not isinstance(clock.jumps, SubStable)
            or clock.drift != 0 or not problem.boundary.is_zero()):
        raise ConfigError(
            "density needs a Brownian driver with positive drift, a pure "
            "stable clock and a zero boundary")
    if abs(x.sigma2 - 1.0) > 1e-12:
        raise ConfigError("density supports unit variance drivers")
    fp = fractional.bm_drift_problem(problem.effective_level, x.drift,
                                     clock.jumps.alpha)
    ts = _parse_grid(args.t_grid)
    with _open_out(args.out, digest, args.seed, "t,f,errEstimate") as fh:
        for t in ts:
            rep = fractional.density_t0(fp, float(t), args.order)
            fh.write("%.17g,%.17g,%.3g\n" % (t, rep.real, rep.abs_error))
    return 0


def _cmd_ruin(args, doc, digest) -> int:
    problem = load_problem(doc)
    x = problem.x_process
    if not (isinstance(x.jumps, CompoundPoissonExp) and x.jumps.sign == "+"
            and x.sigma2 == 0 and x.drift == 0):
        raise ConfigError("ruin needs a compound-Poisson driver with "
                          "positive exponential claims")
    if not problem.boundary.is_pure_drift():
        raise ConfigError("ruin sweep supports drift-only capital inflow")
    model = cox_renewal.RiskModel(x.jumps.rate, x.jumps.jump_rate,
                                  problem.boundary.drift, problem.time_change)
    grid = _parse_grid(args.a_grid)
    with _open_out(args.out, digest, args.seed, "a,ruinProb") as fh:
        for a in grid:
            fh.write("%.17g,%.17g\n" % (a, cox_renewal.ruin_probability(model, float(a))))
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.command == "selftest":
        return 0 if run_selftest() else 3
    try:
        doc, digest = _read_config(args.config)
        handler = {
            "simulate": _cmd_simulate,
            "fpt-lt": _cmd_fpt_lt,
            "wh-check": _cmd_wh_check,
            "scale-fn": _cmd_scale_fn,
            "density": _cmd_density,
            "ruin": _cmd_ruin,
        }[args.command]
        return handler(args, doc, digest)
    except (ConfigError, ModelError, DomainError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ConvergenceError, BracketError) as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
