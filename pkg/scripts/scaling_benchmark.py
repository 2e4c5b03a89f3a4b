"""Wall time of one evaluation against tree size."""
import argparse
import time

import numpy as np

from iflow.evaluation import evaluate_iflows
from iflow.generators import random_network


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10**4, 10**5, 10**6])
    ap.add_argument("--shape", default="recursive", choices=("recursive", "deep", "path"))
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    prev = None
    print("nodes,seconds,ratio_to_linear")
    for n in args.sizes:
        best = np.inf
        for _ in range(args.repeats):
            net = random_network(n, rng, shape=args.shape)
            t0 = time.perf_counter()
            evaluate_iflows(net)
            best = min(best, time.perf_counter() - t0)
        ratio = "" if prev is None else f"{best / (prev[1] * n / prev[0]):.2f}"
        print(f"{n},{best:.5f},{ratio}")
        prev = (n, best)


if __name__ == "__main__":
    main()
