"""Command-line front end: evaluate, bounds, optimize, sweep, export.

Exit codes: 0 success, 2 input or validation error, 3 solver budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .economics import EconomicParams, sweep
from .evaluation import ens_bounds, evaluate_iflows, reliability_report
from .export import arc_report_csv, iflow_dot, node_report_csv
from .islanding import ZoneError, evaluate_with_zones
from .network import NetworkError, format_network, read_network, summary_csv
from .sap import BudgetExceeded, SapInstance, export_milp, solve_exact_dp, solve_heuristic

EXIT_INPUT = 2
EXIT_BUDGET = 3


def _energy(net, kwh: float) -> str:
    if net.units == "MW":
        return f"{kwh / 1000.0:.3f} MWh/year"
    return f"{kwh:.3f} kWh/year"


def _arc(net, arc) -> str:
    i, j = arc
    return f"({net.label(i)},{net.label(j)})"


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def cmd_evaluate(args) -> int:
    net = read_network(args.network)
    state = evaluate_iflows(net)
    rep = evaluate_with_zones(net) if args.zones else reliability_report(net, state)
    if args.report == "csv":
        sys.stdout.write(node_report_csv(net, rep.full_interruption, rep.frequency))
        sys.stdout.write("\n")
        sys.stdout.write(arc_report_csv(net, state))
    else:
        print(f"network {args.network}: {net.n_nodes} nodes, {net.n_arcs} arcs, "
              f"{int(net.switch.sum())} switches")
        print(f"ENS {_energy(net, rep.ens)}")
        print(f"E_lb {_energy(net, rep.e_lb)}")
        print(f"E_ub {_energy(net, rep.e_ub)}")
        if rep.indices_available:
            print(f"SAIDI {rep.saidi:.3f} hours/customer/year")
            print(f"SAIFI {rep.saifi:.3f} interruptions/customer/year")
        else:
            print("SAIDI unavailable (no customer data)")
            print("SAIFI unavailable (no customer data)")
        print(f"max iflow {state.max_iflow:.3f} hours/year")
        if rep.active_zones:
            print("zones " + ", ".join(rep.active_zones))
    if args.dot:
        _write(args.dot, iflow_dot(net, state))
    return 0


def cmd_bounds(args) -> int:
    net = read_network(args.network)
    e_lb, e_ub = ens_bounds(net)
    print(f"E_lb {_energy(net, e_lb)}")
    print(f"E_ub {_energy(net, e_ub)}")
    return 0


def _instance(net, n, fix_breaker):
    return SapInstance.with_breaker(net, n) if fix_breaker else SapInstance(net, n)


def cmd_optimize(args) -> int:
    net = read_network(args.network)
    inst = _instance(net, args.n, args.fix_breaker)
    if args.method == "lp-export":
        out = args.out or Path(args.network).with_suffix(".lp")
        _write(out, export_milp(inst))
        print(f"wrote {out}")
        return 0
    if args.method == "dp":
        sol = solve_exact_dp(inst)
    else:
        sol = solve_heuristic(inst, seed=args.seed)
    e_lb, e_ub = ens_bounds(net)
    print(f"method {args.method} status {sol.status}")
    print(f"switches {len(sol.switch_arcs)}: " + " ".join(_arc(net, a) for a in sol.switch_arcs))
    print(f"ENS {_energy(net, sol.ens)}")
    print(f"E_lb {_energy(net, e_lb)}")
    print(f"E_ub {_energy(net, e_ub)}")
    gap = 0.0 if sol.ens == 0 else 100.0 * (sol.ens - e_lb) / sol.ens
    print(f"gap to E_lb {gap:.3f}%")
    return 0


def cmd_sweep(args) -> int:
    net = read_network(args.network)
    base = _instance(net, 0, args.fix_breaker)
    result = sweep(base, EconomicParams(args.cs, args.ce), range(args.n_min, args.n_max + 1),
                   method=args.method, seed=args.seed)
    text = result.to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.gnuplot:
        _write(args.gnuplot, result.to_gnuplot())
    best = result.best_n
    if best is not None:
        print(f"# best N {best} return {result.best_return:.2f}; "
              f"break-even N {result.break_even_n}", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    net = read_network(args.network)
    if args.summary_csv:
        _write(args.summary_csv, summary_csv(net))
    if args.dot:
        _write(args.dot, iflow_dot(net, evaluate_iflows(net)))
    if args.iflow_csv:
        _write(args.iflow_csv, arc_report_csv(net, evaluate_iflows(net)))
    if args.network_out:
        _write(args.network_out, format_network(net))
    if not any((args.summary_csv, args.dot, args.iflow_csv, args.network_out)):
        sys.stdout.write(summary_csv(net))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("evaluate", help="reliability report for the file's switch set")
    e.add_argument("network")
    e.add_argument("--zones", action="store_true", help="apply the file's restoration zones")
    e.add_argument("--report", choices=("text", "csv"), default="text")
    e.add_argument("--dot", metavar="PATH", help="write the iflow diagram")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bounds", help="ENS lower and upper bounds")
    b.add_argument("network")
    b.set_defaults(func=cmd_bounds)

    o = sub.add_parser("optimize", help="switch allocation")
    o.add_argument("network")
    o.add_argument("--n", type=int, required=True, help="switch budget (fixed breaker not counted)")
    o.add_argument("--method", choices=("dp", "heuristic", "lp-export"), default="dp")
    o.add_argument("--fix-breaker", action="store_true", help="always switch arcs leaving the root")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", metavar="PATH", help="LP file for --method lp-export")
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("sweep", help="economic sweep over switch budgets")
    s.add_argument("network")
    s.add_argument("--cs", type=float, required=True, help="annual cost per switch")
    s.add_argument("--ce", type=float, required=True, help="cost per kWh not supplied")
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--n-min", type=int, default=0)
    s.add_argument("--method", choices=("auto", "dp", "heuristic"), default="auto")
    s.add_argument("--fix-breaker", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", metavar="CSV")
    s.add_argument("--gnuplot", metavar="PATH")
    s.set_defaults(func=cmd_sweep)

    x = sub.add_parser("export", help="structural summary, iflow CSV/DOT, normalised network")
    x.add_argument("network")
    x.add_argument("--summary-csv", metavar="PATH")
    x.add_argument("--iflow-csv", metavar="PATH")
    x.add_argument("--dot", metavar="PATH")
    x.add_argument("--network-out", metavar="PATH")
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NetworkError, ZoneError) as err:
        print(f"iflow: {args.network}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"iflow: {err}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as err:
        print(f"iflow: {err}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
