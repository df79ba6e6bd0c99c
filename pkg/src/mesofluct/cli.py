"""Command-line front end: curves, phase boundary, verification suites.

Exit codes: 0 success, 1 numerical or convergence failure, 2 usage error.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from ._validation import check_positive, uniform_grid
from .entanglement import critical_temperature, entanglement_curve
from .exceptions import BracketError, CompletePositivityError, MesofluctError, ValidityError

CURVE_COLUMNS = ["t", "E", "S", "Idet", "Sigma11", "Sigma22", "Sigma33", "Sigma44", "Sigmac11", "Sigmac22"]
BOUNDARY_COLUMNS = ["k", "T_c", "bisection_margin", "status"]
SUITES = ("micro", "meso", "fock", "all")


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write(rows, columns, fmt, out):
    if fmt == "json":
        text = json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _bath(args, lam=None):
    from .micro_chain import BathParams

    lam = args.lam if lam is None else lam
    if lam**2 > 1:
        raise UsageError("--lambda: complete positivity requires lambda^2 <= 1")
    check_flag("--omega", args.omega)
    if args.beta is not None:
        check_flag("--beta", args.beta)
        return BathParams.from_beta(args.beta, args.omega, lam)
    check_flag("--temperature", args.temperature)
    return BathParams(args.temperature, args.omega, lam)


def check_flag(flag, value):
    try:
        return check_positive(flag, value)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_evolve(args):
    bath = _bath(args)
    check_flag("--t-max", args.t_max)
    check_flag("--dt", args.dt)
    curve = entanglement_curve(bath, args.squeeze, uniform_grid(args.t_max, args.dt))
    rows = []
    for n, t in enumerate(curve.t):
        c = curve.covariances[n]
        rows.append(
            [t, curve.E[n], curve.S[n], curve.Idet[n], c[0, 0], c[1, 1], c[2, 2], c[3, 3], c[0, 2], c[1, 3]]
        )
    _write(rows, CURVE_COLUMNS, args.format, args.out)
    return 0


def cmd_phase(args):
    if args.lam != 1.0:
        print("warning: the critical temperature is defined at lambda = 1", file=sys.stderr)
    if args.lam**2 > 1:
        raise UsageError("--lambda: complete positivity requires lambda^2 <= 1")
    check_flag("--omega", args.omega)
    if args.k_steps < 1:
        raise UsageError("--k-steps: k range is empty")
    if args.k_min <= 0 or args.k_max < args.k_min:
        raise UsageError("--k-min/--k-max: need 0 < k-min <= k-max")
    ks = np.linspace(args.k_min, args.k_max, args.k_steps) if args.k_steps > 1 else np.array([args.k_min])
    tol = 1e-3
    rows, failed = [], False
    for k in ks:
        try:
            rows.append([float(k), critical_temperature(k, args.lam, args.omega, tol=tol), 0.5 * tol, "ok"])
        except BracketError:
            rows.append([float(k), float("nan"), float("nan"), "bracket_failure"])
            failed = True
    _write(rows, BOUNDARY_COLUMNS, args.format, args.out)
    return 1 if failed else 0


def _n_list(text):
    try:
        ns = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--n-list: cannot parse {text!r}") from None
    if not ns or min(ns) < 1:
        raise UsageError("--n-list: need positive integers")
    return ns


def _micro_checks(args):
    from .meso_dynamics import generator, thermal_covariance
    from .micro_chain import BathParams, derive_meso_generator, fluctuation_kinematics, kossakowski_min_eig

    dev = 0.0
    for temp in (0.1, 0.5, 1.0):
        for om in (0.5, 1.0, 2.0):
            for lam in (0.0, 0.3, 0.9, 1.0):
                b = BathParams(temp, om, lam)
                dev = max(dev, float(np.max(np.abs(derive_meso_generator(b).matrix - generator(b).matrix))))
    yield "meso generator matches closed form", dev, 1e-10, dev < 1e-10
    kin = 0.0
    for temp in (0.05, 0.1, 0.5, 1.0):
        b = BathParams(temp)
        kin = max(kin, float(np.max(np.abs(fluctuation_kinematics(b).sigma_beta - thermal_covariance(b)))))
    yield "Wick covariance matches thermal form", kin, 1e-12, kin < 1e-12
    m = min(kossakowski_min_eig(BathParams(t, 1.0, 1.0)) for t in (0.1, 1.0))
    yield "Kossakowski PSD at lambda = 1", m, -1e-12, m >= -1e-12


def _meso_checks(args):
    from .meso_dynamics import cp_certificate, generator, propagate, thermal_covariance

    b = _bath(args)
    gen, sb = generator(b), thermal_covariance(b)
    semi = 0.0
    cp = np.inf
    stat = 0.0
    for t in (0.1, 0.5, 1.0, 5.0, 20.0):
        p, q, pq = propagate(gen, sb, t), propagate(gen, sb, 0.5), propagate(gen, sb, t + 0.5)
        semi = max(semi, np.max(np.abs(p.M @ q.M - pq.M)), np.max(np.abs(p.K + p.M @ q.K @ p.M.T - pq.K)))
        cp = min(cp, cp_certificate(p, sb))
        stat = max(stat, np.max(np.abs(p.K + p.M @ sb @ p.M.T - sb)))
    yield "semigroup composition of M and K", float(semi), 1e-10, semi < 1e-10
    yield "complete positivity margin", float(cp), -1e-10, cp >= -1e-10
    yield "thermal stationarity", float(stat), 1e-9, stat < 1e-9


def _fock_checks(args):
    from .fock_oracle import FockGrid, clt_convergence, theorem2_sandwich, weyl_product_residual

    b = _bath(args)
    grid = FockGrid(args.nmax)
    ns = _n_list(args.n_list)
    rep = clt_convergence(np.eye(6)[0], ns, grid, b)
    print(f"{'N':>8} {'lhs':>24} {'rhs':>12} {'|error|':>12}")
    for row in rep.rows:
        print(f"{row.N:>8d} {row.lhs.real:>+12.9f}{row.lhs.imag:>+11.2e}j {row.rhs.real:>12.9f} {row.error:>12.4e}")
    print(f"slope {rep.slope:.4f}")
    yield "central limit log-log slope", rep.slope, "[-0.65, -0.35]", -0.65 <= rep.slope <= -0.35
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(3):
        r1, r2 = rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6)
        lo, hi = weyl_product_residual(r1, r2, 10**4, grid, b), weyl_product_residual(r1, r2, 10**5, grid, b)
        worst = max(worst, lo if hi < lo else np.inf)
    yield "Weyl product residual at N = 1e4", worst, 0.02, worst < 0.02
    e = np.eye(6)
    dyn = FockGrid(8)
    errs = [theorem2_sandwich(e[0], e[2], e[1], 0.5, n, dyn, b).error for n in (50, 200, 800)]
    yield "sandwich error at N = 800 (decreasing)", errs[-1], "monotone", errs[0] > errs[1] > errs[2]


def cmd_verify(args):
    if args.suite not in SUITES:
        raise UsageError(f"--suite: unknown suite {args.suite!r}")
    suites = {"micro": _micro_checks, "meso": _meso_checks, "fock": _fock_checks}
    names = ["micro", "meso", "fock"] if args.suite == "all" else [args.suite]
    ok = True
    lines = []
    for name in names:
        for check, value, tol, passed in suites[name](args):
            ok &= bool(passed)
            lines.append(f"{check:<42} {_fmt(value):>24} {str(tol):>16} {'PASS' if passed else 'FAIL'}")
    print(f"{'check':<42} {'value':>24} {'tolerance':>16} status")
    print("\n".join(lines))
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="mesofluct", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    temp = common.add_mutually_exclusive_group()
    temp.add_argument("--temperature", type=float, default=0.1)
    temp.add_argument("--beta", type=float, default=None)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--lambda", dest="lam", type=float, default=1.0)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", parents=[common], help="entanglement curve for one parameter set")
    ev.add_argument("--squeeze", type=float, default=1.0)
    ev.add_argument("--t-max", type=float, default=10.0)
    ev.add_argument("--dt", type=float, default=0.01)
    ev.set_defaults(func=cmd_evolve)

    ph = sub.add_parser("phase", parents=[common], help="critical temperature over a squeezing grid")
    ph.add_argument("--k-min", type=float, default=0.25)
    ph.add_argument("--k-max", type=float, default=2.0)
    ph.add_argument("--k-steps", type=int, default=8)
    ph.set_defaults(func=cmd_phase)

    ve = sub.add_parser("verify", parents=[common], help="run invariant suites")
    ve.add_argument("--suite", default="all")
    ve.add_argument("--n-list", default="100,1000,10000,100000")
    ve.add_argument("--nmax", type=int, default=24)
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CompletePositivityError, ValidityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MesofluctError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
