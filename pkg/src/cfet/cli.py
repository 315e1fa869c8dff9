"""Command line interface: ``cfet <command> ...``.

Exit codes: 0 success/confirmed, 1 property violated, 2 usage or contract
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import order_achieved, quadric_system, residual_report, residuals_order5
from .geometry import (
    CertificationError,
    certify_no_order5_y,
    inductive_step_identity,
    random_identity_point,
    sample_simplex_b,
)
from .integrator import IntegrationError, amplification_probe, empirical_order
from .problems import PRESETS, get_problem
from .scalars import ScalarParseError, format_scalar, parse_vector, to_json_scalar
from .scheme import SchemeError, bundled_scheme, bundled_scheme_names, derive_coefficients, load_scheme, validate_scheme
from .search import ORDER5_FLOOR, search_positive_order5
from .taylor import exact_flow_coefficients, word_coefficients_closed, word_coefficients_recursive

OK, VIOLATED, USAGE, NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(ref: str):
    path = Path(ref)
    if path.is_file():
        return load_scheme(path)
    if ref in bundled_scheme_names():
        return bundled_scheme(ref)
    raise UsageError(f"no scheme file {ref!r} (bundled: {', '.join(bundled_scheme_names())})")


def _emit(args, payload, text_lines=None, csv_rows=None):
    fmt = args.format
    if fmt == "json":
        out = json.dumps(payload, indent=2) + "\n"
    elif fmt == "csv":
        if csv_rows is None:
            raise UsageError(f"--format csv is not available for {args.command}")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        out = buf.getvalue()
    else:
        out = "\n".join(text_lines if text_lines is not None else [json.dumps(payload, indent=2)]) + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def cmd_verify(args):
    s = _load(args.scheme)
    dc = derive_coefficients(s)
    tol = args.tol if args.tol is not None else (0 if dc.exact else 1e-12)
    report = residual_report(s.name, dc, tol)
    val = validate_scheme(s)
    report.update(positivity_ok=val.positivity_ok, claimed_order=s.claimed_order, tol=tol, notes=val.notes)
    report["scope"] = "necessary conditions for u' = (A0 + t A1) u"
    ok = s.claimed_order is None or s.claimed_order <= report["order_achieved"]
    lines = [f"scheme {s.name} (J={s.J}, K={s.K}, exact={dc.exact})"]
    lines += [f"  {k:9s} = {v}" for k, v in report["residuals"].items()]
    lines += [
        f"order_achieved = {report['order_achieved']} (claimed {s.claimed_order})",
        f"positivity_ok = {val.positivity_ok}",
    ]
    rows = [("residual", "value")] + list(report["residuals"].items())
    _emit(args, report, lines, rows)
    return OK if ok else VIOLATED


def _parse_range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"bad J range {text!r}, expected lo:hi") from None
    if not 1 <= lo <= hi:
        raise UsageError("J range must satisfy 1 <= lo <= hi")
    return lo, hi


def cmd_certify(args):
    if args.b is not None:
        samples = [parse_vector(args.b)]
        jr = (len(samples[0]), len(samples[0]))
    elif args.scheme is not None:
        dc = derive_coefficients(_load(args.scheme))
        samples = [list(dc.b)]
        jr = (dc.J, dc.J)
    elif args.random is not None:
        if args.random < 1:
            raise UsageError("--random needs a positive count")
        jr = _parse_range(args.J_range)
        rng = random.Random(args.seed)
        samples = [sample_simplex_b(rng, rng.randint(*jr)) for _ in range(args.random)]
    else:
        raise UsageError("give --b, --scheme or --random")
    try:
        certs = [certify_no_order5_y(b) for b in samples]
    except CertificationError as exc:
        _emit(args, {"error": "precondition violated", "detail": str(exc)}, [f"precondition violated: {exc}"])
        return USAGE
    margins = [c.margin for c in certs if c.margin is not None]
    min_margin = min(margins) if margins else None
    report = {
        "sample_count": len(certs),
        "J_range": list(jr),
        "seed": args.seed,
        "verdicts": [c.verdict for c in certs],
        "min_margin": None if min_margin is None else format_scalar(min_margin),
        "certificates": [c.to_json() for c in certs] if len(certs) <= args.max_listed else [],
    }
    n_inf = sum(c.infeasible for c in certs)
    lines = [f"{n_inf}/{len(certs)} infeasible"]
    if min_margin is not None:
        lines.append(f"minimal margin = {format_scalar(min_margin)} (~{float(min_margin):.3e})")
    if len(certs) == 1:
        c = certs[0]
        lines += [f"value = {c.to_json()['value']}", f"margin = {c.to_json()['margin']}", f"verdict = {c.verdict}"]
        if c.reason:
            lines.append(c.reason)
    rows = [("J", "b", "value", "margin", "verdict")] + [
        (c.J, " ".join(format_scalar(x) for x in c.b), c.to_json()["value"], c.to_json()["margin"], c.verdict) for c in certs
    ]
    _emit(args, report, lines, rows)
    return OK if n_inf == len(certs) else VIOLATED


def cmd_search(args):
    if args.restarts < 1 or args.J < 1 or not args.eps > 0:
        raise UsageError("need J >= 1, restarts >= 1, eps > 0")
    rep = search_positive_order5(args.J, args.restarts, args.seed, args.eps, args.order)
    payload = rep.to_json()
    if args.order == 5:
        ok = rep.best_norm > ORDER5_FLOOR
        verdict = f"floor {rep.best_norm:.3e} {'>' if ok else '<='} {ORDER5_FLOOR:g} (calibrated threshold)"
    else:
        ok = rep.best_norm < 1e-10
        verdict = f"best residual {rep.best_norm:.3e} ({'found' if ok else 'not found'})"
    lines = [
        f"J={rep.J} order={rep.target_order} restarts={rep.restarts} seed={rep.seed}",
        verdict,
        f"b = {rep.best_b}",
        f"y = {rep.best_y}",
    ]
    rows = [("restart", "residual_norm")] + [(i, repr(h)) for i, h in enumerate(rep.history)]
    _emit(args, payload, lines, rows)
    return OK if ok else VIOLATED


def _taus(args):
    if args.taus:
        try:
            return [float(x) for x in parse_vector(args.taus)]
        except ScalarParseError as exc:
            raise UsageError(str(exc)) from None
    t0 = float(Fraction(args.tau_max))
    return [t0 / 2**i for i in range(args.levels)]


def cmd_converge(args):
    s = _load(args.scheme)
    p = get_problem(args.problem)
    try:
        rep = empirical_order(s, p, _taus(args))
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL
    fitted = "exact" if rep.exact else rep.fitted_order
    payload = {
        "scheme": s.name,
        "problem": args.problem,
        "taus": rep.taus,
        "errors": rep.errors,
        "observed_orders": rep.observed_orders,
        "fitted_order": fitted,
        "reference_accuracy": rep.reference_accuracy,
        "excluded": rep.excluded,
        "notes": rep.notes,
    }
    fmt = fitted if isinstance(fitted, str) or fitted is None else f"{fitted:.4f}"
    lines = [f"{'tau':>12s} {'error':>12s} {'order':>8s}"]
    for i, (t, e) in enumerate(zip(rep.taus, rep.errors)):
        o = rep.observed_orders[i - 1] if i else None
        lines.append(f"{t:12.6g} {e:12.4e} {'' if o is None else f'{o:8.4f}':>8s}")
    lines.append(f"fitted order: {fmt}")
    _emit(args, payload, lines, rep.csv_rows())
    if args.format == "csv" and args.output:
        print(f"fitted order: {fmt}")
    return OK


def cmd_identity_check(args):
    if args.point:
        pts = [tuple(parse_vector(args.point))]
        if len(pts[0]) != 5:
            raise UsageError("--point needs s1,bb,eSe,eSd,dSd")
    else:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        rng = random.Random(args.seed)
        pts = [random_identity_point(rng) for _ in range(args.trials)]
    diffs = [inductive_step_identity(*pt) for pt in pts]
    bad = [i for i, d in enumerate(diffs) if d != 0]
    payload = {"trials": len(pts), "seed": args.seed, "nonzero": bad, "all_zero": not bad}
    lines = [f"{len(pts) - len(bad)}/{len(pts)} points give expr3 - expr4 = 0"]
    _emit(args, payload, lines)
    return OK if not bad else VIOLATED


def cmd_stability(args):
    s = _load(args.scheme)
    p = get_problem(args.problem)
    factors = amplification_probe(s, p, float(Fraction(args.tau)))
    mx = max(factors)
    payload = {"scheme": s.name, "problem": args.problem, "tau": float(Fraction(args.tau)), "factors": factors, "max": mx}
    lines = [f"substep {j + 1}: {f:.6e}" for j, f in enumerate(factors)] + [f"max = {mx:.6e}"]
    rows = [("substep", "factor")] + [(j + 1, repr(f)) for j, f in enumerate(factors)]
    _emit(args, payload, lines, rows)
    return OK if mx <= 1 + 1e-8 else VIOLATED


def cmd_derive_conditions(args):
    s = _load(args.scheme)
    dc = derive_coefficients(s)
    q = quadric_system(dc)
    js = lambda v: [to_json_scalar(x) for x in v]  # noqa: E731
    payload = {
        "scheme": s.name,
        "conditions": residual_report(s.name, dc, 0 if dc.exact else 1e-12),
        "derived": {"b": js(dc.b), "y": js(dc.y), "bhat": js(dc.bhat), "yhat": js(dc.yhat), "sigma": to_json_scalar(dc.sigma)},
        "quadric": {"e": js(q.e), "d": js(q.d), "S": [js(r) for r in q.S], "rhs": js(q.rhs)},
        "taylor": {
            "recursive": {w or "empty": to_json_scalar(v) for w, v in word_coefficients_recursive(dc.b, dc.y).coeffs.items()},
            "closed": {w or "empty": to_json_scalar(v) for w, v in word_coefficients_closed(dc.b, dc.y).coeffs.items()},
            "exact_flow": {w or "empty": format_scalar(v) for w, v in exact_flow_coefficients().coeffs.items()},
        },
    }
    if args.format == "csv":
        raise UsageError("derive-conditions writes JSON only")
    args.format = "json"
    _emit(args, payload)
    return OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")

    parser = argparse.ArgumentParser(prog="cfet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="order-condition residuals of a scheme")
    p.add_argument("scheme", help="scheme JSON file or bundled name")
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", parents=[common], help="exact infeasibility certificates")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--b", help='weights, e.g. "1/2,1/2"')
    g.add_argument("--scheme", help="certify the weights of a scheme")
    g.add_argument("--random", type=int, metavar="N")
    p.add_argument("--J-range", dest="J_range", default="2:8")
    p.add_argument("--max-listed", type=int, default=50, help="list individual certificates up to this count")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("search", parents=[common], help="multistart search for positive-weight schemes")
    p.add_argument("--J", type=int, default=2)
    p.add_argument("--order", type=int, default=5, choices=range(1, 6))
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--eps", type=float, default=1e-6)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("converge", parents=[common], help="empirical convergence order")
    p.add_argument("scheme")
    p.add_argument("problem", choices=sorted(PRESETS))
    p.add_argument("--taus", help="comma separated step sizes (ratio 2)")
    p.add_argument("--tau-max", default="1/8")
    p.add_argument("--levels", type=int, default=5)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("identity-check", parents=[common], help="inductive-step identity at random rational points")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--point", help="s1,bb,eSe,eSd,dSd")
    p.set_defaults(func=cmd_identity_check)

    p = sub.add_parser("stability", parents=[common], help="per-substep amplification factors")
    p.add_argument("scheme")
    p.add_argument("problem", choices=sorted(PRESETS))
    p.add_argument("--tau", required=True)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("derive-conditions", parents=[common], help="dump conditions and Taylor tables as JSON")
    p.add_argument("scheme")
    p.set_defaults(func=cmd_derive_conditions)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    try:
        return args.func(args)
    except (UsageError, SchemeError, ScalarParseError, CertificationError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
