"""Command-line front end.

Exit codes: 0 success or pass, 1 property failure (witness printed),
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import constructions as K
from .audits import audit_dsic, audit_mmic, audit_oca, audit_scp, enumerate_zero_revenue
from .collusion_lab import check_collusion_ic, check_collusion_ir, search_ic_ir_collusion
from .collusion_free import collusion_free_prices, worst_case_report
from .distribution import DiscreteDistribution, ZeroDensity, as_fraction, is_discrete_regular, is_regular, root_set
from .mechanism_core import BidGrid, InvalidParams, check_basic_properties
from .pricing import BurnExceedsPrice, curves_csv, myerson_price, price_curves, price_point
from .specfiles import SpecError, load_collusion, load_distribution, load_mechanism

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _g9(x) -> str:
    return f"{float(x):.9g}"


def _number(text: str):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _beta_grid(spec: str):
    try:
        lo, hi, steps = spec.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise UsageError(f"beta grid must look like lo:hi:steps, got {spec!r}") from None
    if steps < 1 or hi < lo:
        raise UsageError("beta grid needs steps >= 1 and lo <= hi")
    return [lo + (hi - lo) * k / steps for k in range(steps + 1)]


def _emit_report(report, args) -> int:
    print(report)
    if getattr(args, "report", None):
        try:
            with open(args.report, "w") as fh:
                fh.write(report.to_json() + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.report}: {exc.strerror}") from None
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_price(args) -> int:
    dist = load_distribution(args.dist)
    beta = float(args.beta) if not isinstance(dist, DiscreteDistribution) else _number(args.beta)
    rho = myerson_price(dist, beta)
    pt = price_point(dist, rho, beta)
    for label, val in (("price", pt.price), ("revenue", pt.revenue), ("welfare", pt.welfare),
                       ("bidder_utility", pt.bidder_utility), ("realized_burn", pt.realized_burn)):
        print(f"{label}: {_g9(val)}")
    return EXIT_OK


def cmd_curves(args) -> int:
    dist = load_distribution(args.dist)
    betas = _beta_grid(args.betas)
    if any(b > float(dist.support_hi) for b in betas):
        raise UsageError("burn levels must not exceed the top of the support")
    text = curves_csv(price_curves(dist, betas))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        print(f"wrote {len(betas)} rows to {args.out}")
    return EXIT_OK


def cmd_collusion_free(args) -> int:
    dist = load_distribution(args.dist)
    beta = _number(args.beta)
    if not isinstance(dist, DiscreteDistribution):
        beta = float(beta)
    print(collusion_free_prices(dist, beta))
    return EXIT_OK


def cmd_approx(args) -> int:
    dist = load_distribution(args.dist)
    rep = worst_case_report(dist)
    print(f"C_F: {_g9(rep.C_rho)}")
    print(f"price: {_g9(rep.price)}")
    print(f"revenue_ratio: {_g9(rep.revenue_ratio)}")
    print(f"welfare_ratio: {_g9(rep.welfare_ratio)}")
    if isinstance(dist, DiscreteDistribution):
        print(f"discrete_regular: {is_discrete_regular(dist)}")
    return EXIT_OK


def _valuations(args):
    if not args.valuations:
        return None
    return [tuple(_number(x) for x in v.split(",")) for v in args.valuations]


def cmd_check(args) -> int:
    mech = load_mechanism(args.mech)
    vals = _valuations(args)
    if args.prop == "dsic":
        rep = audit_dsic(mech)
    elif args.prop == "mmic":
        rep = audit_mmic(mech, args.fake_budget)
    elif args.prop == "oca":
        rep = audit_oca(mech, args.fake_budget, valuations=vals, midpoints=args.midpoints)
    elif args.prop == "scp":
        if args.c is None:
            raise UsageError("--prop scp needs --c")
        rep = audit_scp(mech, args.c, args.fake_budget, valuations=vals, midpoints=args.midpoints)
    else:
        rep = check_basic_properties(mech)
    return _emit_report(rep, args)


def cmd_collude(args) -> int:
    mech = load_mechanism(args.mech)
    prior = load_distribution(args.prior) if args.prior else None
    if args.action == "check":
        if not args.collusion:
            raise UsageError("collude check needs --collusion")
        col = load_collusion(args.collusion, mech.grid)
        ic = check_collusion_ic(mech, col, args.fake_budget)
        code = _emit_report(ic, args)
        if prior is not None:
            ir = check_collusion_ir(mech, col, prior, args.n)
            print(ir)
            code = max(code, EXIT_OK if ir.passed else EXIT_FAIL)
        return code
    if prior is None:
        raise UsageError("collude search needs --prior")
    res = search_ic_ir_collusion(mech, prior)
    if res is None:
        print("no IC+IR collusion found")
        return EXIT_OK
    print(f"found: {res.collusion.name}")
    print(f"  bids >= {res.threshold} become {res.target}, rebate {res.rebate}")
    print(f"  miner gain: {_g9(res.miner_gain)}  bidder gain: {_g9(res.bidder_gain)}")
    return EXIT_FAIL


def cmd_enumerate(args) -> int:
    levels = tuple(_number(x) for x in args.levels.split(","))
    summary = enumerate_zero_revenue(BidGrid(levels), args.n)
    print(summary.line())
    return EXIT_OK


def _spec_of(path):
    with open(path) as fh:
        return json.load(fh)


def cmd_build(args) -> int:
    if args.family == "cubic":
        spec = {"kind": "cubic_poly", "a": args.a, "b": args.b, "c": args.c}
        dist = K.build_cubic(K.CubicSpec(args.a, args.b, args.c))
    elif args.family == "trunc":
        spec = {"kind": "trunc_equal_revenue", "T": args.T, "eps": args.eps}
        dist = K.build_trunc_equal_revenue(K.TruncEqualRevenueSpec(args.T, args.eps))
    elif args.family == "sqrtlog":
        spec = {"kind": "sqrtlog", "n": args.n}
        dist = K.build_sqrtlog_family(args.n)
    else:
        if not args.inner:
            raise UsageError("build smear needs --inner <discrete spec file>")
        with_inner = load_distribution(args.inner)
        if not isinstance(with_inner, DiscreteDistribution):
            raise UsageError("--inner must be a discrete distribution")
        spec = {"kind": "smear", "inner": _spec_of(args.inner), "eps": args.eps}
        dist = K.epsilon_smear(with_inner, args.eps)
    print(f"support: [{_g9(dist.support_lo)}, {_g9(dist.support_hi)}]")
    print(f"myerson price: {_g9(myerson_price(dist, 0))}")
    if isinstance(dist, DiscreteDistribution):
        print(f"discrete regular: {is_discrete_regular(dist)}")
    else:
        try:
            print(f"regular: {is_regular(dist)}")
        except ZeroDensity as exc:
            print(f"regular: undefined ({exc})")
        print("virtual value roots: " + ", ".join(_g9(r) for r in root_set(dist)))
    if args.out:
        try:
            with open(args.out, "w") as fh:
                json.dump(spec, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tfm-lab", description="Posted prices with burn, "
                                "collusion-free pricing and brute-force mechanism audits.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("price", help="Myerson price and its economics at one burn level")
    s.add_argument("--dist", required=True)
    s.add_argument("--beta", default="0")
    s.set_defaults(fn=cmd_price)

    s = sub.add_parser("curves", help="CSV of price, revenue, utility, burn, welfare over burns")
    s.add_argument("--dist", required=True)
    s.add_argument("--betas", default="0:1:100", help="lo:hi:steps")
    s.add_argument("--out", default="-")
    s.set_defaults(fn=cmd_curves)

    s = sub.add_parser("collusion-free", help="collusion-free posted prices at a burn level")
    s.add_argument("--dist", required=True)
    s.add_argument("--beta", default="0")
    s.set_defaults(fn=cmd_collusion_free)

    s = sub.add_parser("approx", help="worst welfare-revenue approximation factor")
    s.add_argument("--dist", required=True)
    s.set_defaults(fn=cmd_approx)

    s = sub.add_parser("check", help="audit a mechanism")
    s.add_argument("--mech", required=True)
    s.add_argument("--prop", required=True, choices=["dsic", "mmic", "oca", "scp", "basic"])
    s.add_argument("--c", type=int)
    s.add_argument("--fake-budget", type=int, default=2)
    s.add_argument("--valuations", action="append",
                   help="comma-separated valuation vector to audit (repeatable)")
    s.add_argument("--midpoints", action="store_true",
                   help="also audit valuations halfway between grid levels")
    s.add_argument("--report", help="write a JSON report here")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("collude", help="check or search side agreements")
    s.add_argument("action", choices=["check", "search"])
    s.add_argument("--mech", required=True)
    s.add_argument("--collusion")
    s.add_argument("--prior")
    s.add_argument("--n", type=int, default=1, help="bidders drawn from the prior for IR")
    s.add_argument("--fake-budget", type=int, default=2)
    s.add_argument("--report")
    s.set_defaults(fn=cmd_collude)

    s = sub.add_parser("enumerate", help="exhaustive DSIC+MMIC+OCA mechanism enumeration")
    s.add_argument("--levels", required=True, help="comma-separated grid, starting at 0")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("build", help="construct a named prior family")
    s.add_argument("family", choices=["cubic", "trunc", "sqrtlog", "smear"])
    s.add_argument("--inner", help="discrete spec file to smear")
    s.add_argument("--a", type=float, default=5.62)
    s.add_argument("--b", type=float, default=10.0)
    s.add_argument("--c", type=float, default=5.62)
    s.add_argument("--T", type=float, default=2.0)
    s.add_argument("--eps", type=float, default=0.5)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_build)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (UsageError, SpecError, InvalidParams, K.InvalidParams, BurnExceedsPrice) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
