"""Optimal ENS and planner return for every switch budget on a network file."""
import argparse

from iflow.economics import EconomicParams, sweep
from iflow.fixtures import fixture_path
from iflow.network import read_network
from iflow.sap import SapInstance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("network", nargs="?", default=str(fixture_path("table1")))
    ap.add_argument("--cs", type=float, default=1358.00, help="annual cost per switch")
    ap.add_argument("--ce", type=float, default=1.53, help="cost per kWh not supplied")
    ap.add_argument("--n-max", type=int)
    ap.add_argument("--fix-breaker", action="store_true")
    ap.add_argument("--method", default="auto", choices=("auto", "dp", "heuristic"))
    args = ap.parse_args()
    net = read_network(args.network)
    base = SapInstance.with_breaker(net, 0) if args.fix_breaker else SapInstance(net, 0)
    n_max = net.n_arcs if args.n_max is None else args.n_max
    res = sweep(base, EconomicParams(args.cs, args.ce), range(n_max + 1), method=args.method)
    print(res.to_csv(), end="")
    print(f"# best N {res.best_n}, return {res.best_return:.2f}, break-even N {res.break_even_n}")


if __name__ == "__main__":
    main()
