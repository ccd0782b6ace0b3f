"""Command line interface: ``igablend <subcommand> [options]``."""
import argparse
import csv
import math
import sys

import numpy as np

from . import harness, reference
from .assembly import assemble_1d, stencil
from .dispersion import dispersion_curve, spectrum_curve, symbol
from .eigensolve import solve_gevp
from .errors import InvalidParameter, IgaError, NumericalError, UnsafeRuleError
from .estimator import estimate
from .quadrature import parse_rule
from .series import expand_dispersion, expand_spectrum, format_coefficient
from .splines import make_space

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4


class VerifyMismatch(Exception):
    pass


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise InvalidParameter(f"expected comma-separated integers, got {text!r}") from exc


def _mode(text, dim):
    m = _ints(text)
    if len(m) == 1 and dim > 1:
        m = m * dim
    if len(m) != dim:
        raise InvalidParameter(f"mode {text!r} does not match --dim {dim}")
    return m[0] if dim == 1 else tuple(m)


def _open(path):
    return open(path, "w", newline="") if path else sys.stdout


def _fmt(v):
    return f"{float(v):.17e}"


def cmd_series(args):
    sym = stencil(args.p, parse_rule(args.rule, args.p))
    f = expand_dispersion if args.kind == "dispersion" else expand_spectrum
    ser = f(sym, args.order)
    out = _open(args.out)
    w = csv.writer(out, lineterminator="\n")
    if args.format == "csv":
        w.writerow(("power", "numerator", "denominator"))
        for n, c in enumerate(ser.coeffs):
            if c:
                w.writerow((n, c.numerator, c.denominator))
    else:
        for n, c in enumerate(ser.coeffs):
            if c:
                val = format_coefficient(c) if args.format == "rational" else _fmt(c)
                out.write(f"L^{n}\t{val}\n")
    if args.verify:
        if args.kind != "dispersion":
            raise InvalidParameter("--verify checks dispersion series only")
        known = reference.published_dispersion(args.p, args.rule)
        if not known:
            raise InvalidParameter(f"no published coefficients for p={args.p} rule={args.rule}")
        bad = [
            (n, v, ser.coeffs[n] if n < len(ser.coeffs) else None)
            for n, v in sorted(known.items())
            if n >= len(ser.coeffs) or ser.coeffs[n] != v
        ]
        for n, v, got in bad:
            print(f"mismatch at L^{n}: published {v}, computed {got}", file=sys.stderr)
        if bad:
            raise VerifyMismatch
    return EXIT_OK


def cmd_stencil(args):
    sym = stencil(args.p, parse_rule(args.rule, args.p))
    out = _open(args.out)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("offset", "stiffness", "mass"))
    for k in range(sym.p + 1):
        if args.format == "rational":
            w.writerow((k, format_coefficient(sym.stiffness[k]), format_coefficient(sym.mass[k])))
        else:
            w.writerow((k, _fmt(sym.stiffness[k]), _fmt(sym.mass[k])))
    return EXIT_OK


def _dump(path, K, M, rational):
    with open(path, "w") as fh:
        for name, A in (("K", K), ("M", M)):
            for k, band in enumerate(A.bands):
                for i, v in enumerate(band):
                    if v:
                        val = format_coefficient(v) if rational else _fmt(v)
                        fh.write(f"{name} {i} {i + k} {val}\n")


def cmd_eigen(args):
    Ns = _ints(args.elements)
    spec = parse_rule(args.rule, args.p)
    out = _open(args.out)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("N", "index", "lambda_h", "lambda", "relative_error"))
    for N in Ns:
        exact = args.format == "rational" or args.dump is not None
        K, M = assemble_1d(make_space(args.p, N), spec, spec, exact=exact)
        if args.dump:
            _dump(args.dump, K, M, args.format == "rational")
        sol = solve_gevp(K, M)
        count = len(sol) if args.count is None else min(args.count, len(sol))
        for j in range(1, count + 1):
            lam = (j * math.pi) ** 2
            v = sol.eigenvalues[j - 1]
            w.writerow((N, j, _fmt(v), _fmt(lam), _fmt(abs(v - lam) / lam)))
    return EXIT_OK


def _timings(results):
    for r in results:
        for N, t in sorted(r.timings.items()):
            print(f"timing {r.kind} p={r.p} rule={r.rule} N={N}: {t:.3f} s", file=sys.stderr)


def cmd_study(args):
    dim = args.dim
    mode = _mode(args.mode, dim)
    Ns = _ints(args.elements) if args.elements else None
    if args.kind == "ev":
        res = harness.ev_error_study(args.p, args.rule, dim, mode, Ns, fit_last=args.fit_last)
    elif args.kind == "ef":
        res = harness.ef_error_study(
            args.p, args.rule, dim, mode, Ns, norm=args.norm,
            normalization=args.normalization, fit_last=args.fit_last,
        )
    else:
        if dim != 1:
            raise InvalidParameter("effectivity studies are one-dimensional")
        res = harness.ei_study(args.p, args.rule, mode, Ns or reference.TABLE3_NS)
    harness.write_csv([res], _open(args.out))
    if args.timing:
        _timings([res])
    if args.verify:
        _verify_study(args, res)
    return EXIT_OK


def _verify_study(args, res):
    if args.kind == "ef" and args.p == 2 and res.mode == (3,) and args.norm == "H1":
        ref = reference.TABLE2.get(args.rule)
        if ref is None:
            raise InvalidParameter(f"no reference data for rule {args.rule}")
        got = {N: err for N, _, _, err in res.rows}
        bad = [
            (N, v, got.get(N)) for N, v in zip(reference.TABLE2_NS, ref)
            if N not in got or abs(got[N] - v) > 1e-3 * v
        ]
    elif args.kind == "ei" and (args.p, res.mode[0]) in reference.TABLE3:
        ref, _ = reference.TABLE3[(args.p, res.mode[0])]
        got = {N: v for N, _, v, _ in res.rows}
        bad = [
            (N, v, got.get(N)) for N, v in zip(reference.TABLE3_NS, ref)
            if N not in got or abs(got[N] - v) > 1e-2
        ]
    else:
        raise InvalidParameter("no published data to verify this study against")
    for N, v, g in bad:
        print(f"mismatch at N={N}: published {v}, computed {g}", file=sys.stderr)
    if bad:
        raise VerifyMismatch


def cmd_dispersion_curve(args):
    sym = symbol(args.p, args.rule)
    if args.lambdas:
        Ls = [float(v) for v in args.lambdas.split(",")]
    else:
        Ls = list(np.linspace(args.max / args.samples, args.max, args.samples))
    out = _open(args.out)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("Lambda", "mu_h", "spectrum_value", "error_mu", "error_spectrum"))
    for L in Ls:
        mu = dispersion_curve(sym, L)
        sp = spectrum_curve(sym, L)
        w.writerow((_fmt(L), _fmt(mu), _fmt(sp), _fmt(mu - L), _fmt(sp - L)))
    return EXIT_OK


def cmd_estimate(args):
    out = _open(args.out)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("p", "rule", "N", "mode", "lambda_h", "R", "energy_error", "EI"))
    for N in _ints(args.elements):
        for j in _ints(args.mode):
            r = estimate(args.p, args.rule, N, j)
            w.writerow((r.p, r.rule, N, j, _fmt(r.lambda_h), _fmt(r.R), _fmt(r.energy_error), _fmt(r.EI)))
    return EXIT_OK


def cmd_probe(args):
    if not args.unsafe_rule:
        raise UnsafeRuleError("degradation-probe under-integrates stiffness; pass --unsafe-rule")
    Ns = _ints(args.elements) if args.elements else None
    res = harness.degradation_probe(
        args.p, args.stiffness_rule, args.rule, int(args.mode), Ns, unsafe_rule=True
    )
    harness.write_csv([res], _open(args.out))
    print(f"fitted order {res.order:.3f}", file=sys.stderr)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="igablend", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, rule="g+1", out=True):
        p.add_argument("--p", type=int, default=2, help="spline degree (1..7)")
        p.add_argument("--rule", default=rule, help="g+1, gl+1, g+0, opt, G3, blend:TAU:R1:R2 ...")
        if out:
            p.add_argument("--out", help="output path (default stdout)")

    s = sub.add_parser("series", help="dispersion/spectrum series coefficients")
    common(s)
    s.add_argument("--kind", choices=("dispersion", "spectrum"), default="dispersion")
    s.add_argument("--order", type=int, default=None)
    s.add_argument("--format", choices=("rational", "csv", "decimal"), default="rational")
    s.add_argument("--verify", action="store_true", help="compare with published coefficients")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("stencil", help="interior stiffness/mass stencil")
    common(s)
    s.add_argument("--format", choices=("rational", "csv"), default="rational")
    s.set_defaults(func=cmd_stencil)

    s = sub.add_parser("eigen", help="1D discrete eigenvalues")
    common(s)
    s.add_argument("--elements", default="20")
    s.add_argument("--count", type=int, default=None, help="number of eigenvalues to print")
    s.add_argument("--dump", help="write K and M triplets (row col value) to this file")
    s.add_argument("--format", choices=("csv", "rational"), default="csv",
                   help="rational: dump exact entries")
    s.set_defaults(func=cmd_eigen)

    s = sub.add_parser("study", help="convergence study (CSV)")
    s.add_argument("kind", choices=("ev", "ef", "ei"))
    common(s)
    s.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    s.add_argument("--elements", help="comma list of element counts per axis")
    s.add_argument("--mode", default="3", help="j or j,k")
    s.add_argument("--norm", choices=("H1", "L2"), default="H1")
    s.add_argument("--normalization", choices=("b", "l2"), default="l2",
                   help="l2: unit L2 norm (default); b: unit quadrature mass")
    s.add_argument("--fit-last", type=int, default=None, help="fit the order on the finest meshes only")
    s.add_argument("--format", choices=("csv",), default="csv")
    s.add_argument("--timing", action="store_true", help="print per-mesh wall-clock time")
    s.add_argument("--verify", action="store_true", help="compare with published tables")
    s.set_defaults(func=cmd_study)

    s = sub.add_parser("dispersion-curve", help="mu h and spectrum curves (CSV)")
    common(s)
    s.add_argument("--lambdas", help="comma list of Lambda values")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--max", type=float, default=1.0)
    s.set_defaults(func=cmd_dispersion_curve)

    s = sub.add_parser("estimate", help="error estimator and effectivity index (CSV)")
    common(s, rule="opt")
    s.add_argument("--elements", default="5,10,20,40")
    s.add_argument("--mode", default="1")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("degradation-probe", help="EV study with under-integrated stiffness")
    common(s)
    s.add_argument("--stiffness-rule", default="GL2")
    s.add_argument("--elements")
    s.add_argument("--mode", default="3")
    s.add_argument("--unsafe-rule", action="store_true", help="required opt-in")
    s.set_defaults(func=cmd_probe)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except VerifyMismatch:
        return EXIT_VERIFY
    except (InvalidParameter, UnsafeRuleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IgaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
