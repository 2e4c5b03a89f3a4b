"""Evaluate the three bundled feeder configurations and print their indices."""
from iflow.evaluation import ens_bounds, evaluate_iflows, reliability_report
from iflow.fixtures import load_fixture
from iflow.islanding import evaluate_with_zones


def main():
    for name in ("config1", "config2", "config3"):
        net = load_fixture(name)
        rep = evaluate_with_zones(net) if net.zones else reliability_report(net)
        print(f"{name}: ENS {rep.ens / 1000:.3f} MWh/year")
        state = evaluate_iflows(net)
        for (i, j), f in state.arc_iflows(net).items():
            print(f"  f({i},{j}) = {f:.3f}")
    e_lb, e_ub = ens_bounds(load_fixture("table1"))
    print(f"bounds: {e_lb / 1000:.3f} .. {e_ub / 1000:.3f} MWh/year")


if __name__ == "__main__":
    main()
