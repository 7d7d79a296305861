"""Command-line front end: run, sweep, costs, selftest."""

import argparse
import io
import json
import sys

from . import costs as costs_mod
from .errors import ProtocolError
from .simulator import SCHEMES, SimConfig, run_with_params


def _add_common(sub):
    sub.add_argument("--scheme", choices=SCHEMES, default="gcsa-na")
    sub.add_argument("--modulus", type=int, default=65537)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("-p", "--p", dest="p", type=int, default=1)
    sub.add_argument("-m", "--m", dest="m", type=int, default=1)
    sub.add_argument("-n", "--n", dest="n", type=int, default=1)
    sub.add_argument("--ell", type=int, default=1)
    sub.add_argument("--Kc", type=int, default=1)
    sub.add_argument("-X", "--X", dest="X", type=int, default=1)
    sub.add_argument("-S", "--S", dest="S", type=int, default=None)


def _parse_topology(value):
    if value in ("complete", "star", "line"):
        return value, None
    if value.startswith("path-file:"):
        path = value.split(":", 1)[1]
        with open(path) as fh:
            raw = json.load(fh)
        edges = raw["edges"] if isinstance(raw, dict) else raw
        return "custom", tuple(tuple(e) for e in edges)
    raise argparse.ArgumentTypeError(
        f"topology must be complete, star, line, or path-file:PATH, got {value!r}")


def _frac(f):
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def cmd_run(args):
    if args.config:
        config = SimConfig.from_file(args.config)
    else:
        kind, edges = args.topology
        config = SimConfig(
            scheme=args.scheme, p=args.p, m=args.m, n=args.n, ell=args.ell,
            Kc=args.Kc, X=args.X, lam=args.lam, kappa=args.kappa, mu=args.mu,
            S=args.S, modulus=args.modulus, seed=args.seed,
            stragglers=args.stragglers, topology=kind, edges=edges,
        )
    result, params = run_with_params(config)
    trace = result.trace
    print(f"scheme     {trace.scheme}")
    print(f"servers    S={trace.meta['S']} threshold R={trace.meta['R']}")
    print(f"decode     {'PASS' if result.ok else 'FAIL'}")
    for phase in ("offline-noise", "sharing", "exchange", "answer"):
        msgs = trace.phase_messages(phase)
        if msgs:
            print(f"{phase:14s} {len(msgs):5d} messages, {trace.symbols(phase=phase)} symbols")
    if params is not None:
        report = costs_mod.measured_costs(trace, params)
        print(f"measured   UA={_frac(report.UA)} UB={_frac(report.UB)} "
              f"CC={_frac(report.CC)} D={_frac(report.D)}")
    ops = {ph: dict(c) for ph, c in trace.op_counts.items()}
    print(f"field ops  {json.dumps(ops, sort_keys=True)}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(trace.to_json())
        print(f"trace written to {args.out}")
    return 0 if result.ok else 1


def cmd_sweep(args):
    rows = costs_mod.sweep(args.axis, X=args.X, values=args.values)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            costs_mod.write_csv(rows, fh)
        print(f"csv written to {args.out}")
        if not args.no_plot:
            from .plots import render_sweep
            fig_path = args.out.rsplit(".", 1)[0] + ".png"
            render_sweep(rows, args.axis, fig_path)
            print(f"figure written to {fig_path}")
    else:
        buf = io.StringIO()
        costs_mod.write_csv(rows, buf)
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_costs(args):
    report = costs_mod.theoretical_costs(
        args.scheme, p=args.p, m=args.m, n=args.n, X=args.X,
        ell=args.ell, Kc=args.Kc, S=args.S)
    print(f"scheme     {report.scheme}")
    print(f"threshold  R={report.R}  servers S={report.S}  batch L={report.L}")
    print(f"upload A   {_frac(report.UA)}")
    print(f"upload B   {_frac(report.UB)}")
    print(f"server     {_frac(report.CC)}")
    print(f"download   {_frac(report.D)}")
    return 0


def cmd_selftest(args):
    from .selfcheck import run_all
    results = run_all()
    failed = 0
    for res in results:
        tag = "PASS" if res.ok else "FAIL"
        print(f"{tag}  {res.name}: {res.detail}")
        failed += 0 if res.ok else 1
    return 0 if failed == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="smbmm",
        description="Secure multi-party batch matrix multiplication over prime fields.")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="simulate one protocol instance")
    _add_common(run)
    run.add_argument("--config", help="JSON config file; overrides the flags")
    run.add_argument("--lam", type=int, default=4)
    run.add_argument("--kappa", type=int, default=4)
    run.add_argument("--mu", type=int, default=4)
    run.add_argument("--stragglers", type=_stragglers, default=0,
                     help="count, or comma-separated server ids")
    run.add_argument("--topology", type=_parse_topology, default=("complete", None),
                     help="complete, star, line, or path-file:PATH")
    run.add_argument("--out", help="write the trace report as JSON")

    sweep = subs.add_parser("sweep", help="cost comparison along one axis")
    sweep.add_argument("--axis", choices=("partition", "batch"), required=True)
    sweep.add_argument("-X", "--X", dest="X", type=int, default=5)
    sweep.add_argument("--values", type=_int_list, default=None,
                       help="comma-separated axis values")
    sweep.add_argument("--out", help="CSV path; a PNG is rendered alongside")
    sweep.add_argument("--no-plot", action="store_true")

    costs = subs.add_parser("costs", help="print the cost formulas for one point")
    _add_common(costs)

    subs.add_parser("selftest", help="run the exhaustive security checks")
    return parser


def _stragglers(value):
    if "," in value:
        return [int(v) for v in value.split(",") if v]
    return int(value)


def _int_list(value):
    return [int(v) for v in value.split(",") if v]


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "costs":
            return cmd_costs(args)
        return cmd_selftest(args)
    except ProtocolError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
