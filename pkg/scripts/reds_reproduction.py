"""Bounds and economic sweep for benchmark feeders converted to the network format.

Expects R3.net .. R7.net (loads in kW) in the given directory.
"""
import argparse
from pathlib import Path

from iflow.economics import EconomicParams, sweep
from iflow.evaluation import ens_bounds
from iflow.network import read_network
from iflow.sap import SapInstance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", type=Path)
    ap.add_argument("--sweep", default="R5", help="network for the economic sweep")
    args = ap.parse_args()
    print("network,nodes,arcs,total_load_kw,e_lb_kwh,e_ub_kwh")
    for name in ("R3", "R4", "R5", "R6", "R7"):
        path = args.directory / f"{name}.net"
        if not path.exists():
            print(f"# {path} missing")
            continue
        net = read_network(path)
        e_lb, e_ub = ens_bounds(net)
        print(f"{name},{net.n_nodes},{net.n_arcs},{net.summary.total_load:.2f},{e_lb:.2f},{e_ub:.2f}")
    path = args.directory / f"{args.sweep}.net"
    if path.exists():
        net = read_network(path)
        res = sweep(SapInstance(net, 0), EconomicParams(1358.00, 1.53), range(net.n_arcs + 1))
        print(res.to_csv(), end="")
        print(f"# best N {res.best_n}, return {res.best_return:.2f}, break-even N {res.break_even_n}")


if __name__ == "__main__":
    main()
