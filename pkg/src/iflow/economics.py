"""Planner economics over a sweep of switch budgets."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import ens, evaluate_iflows
from .sap import BudgetExceeded, SapInstance, solve_exact_dp_sweep, solve_heuristic


@dataclass(frozen=True)
class EconomicParams:
    switch_cost: float
    energy_cost: float

    def __post_init__(self):
        if self.switch_cost < 0 or self.energy_cost < 0:
            raise ValueError("costs must be non-negative")


@dataclass(frozen=True)
class SweepPoint:
    n: int
    ens: float | None
    savings: float | None
    investment: float
    ret: float | None
    status: str
    switch_arcs: tuple = ()


@dataclass(frozen=True)
class EconomicSweep:
    points: tuple[SweepPoint, ...]
    e_ub: float
    params: EconomicParams

    @property
    def best_n(self) -> int | None:
        ok = [p for p in self.points if p.ret is not None]
        return max(ok, key=lambda p: (p.ret, -p.n)).n if ok else None

    @property
    def best_return(self) -> float | None:
        best = self.best_n
        return None if best is None else next(p.ret for p in self.points if p.n == best)

    @property
    def break_even_n(self) -> int | None:
        ok = [p.n for p in self.points if p.ret is not None and p.ret >= 0]
        return max(ok) if ok else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "ens_kwh_yr", "savings", "investment", "return", "status"])
        for p in self.points:
            w.writerow([p.n, "" if p.ens is None else repr(p.ens),
                        "" if p.savings is None else repr(p.savings), repr(p.investment),
                        "" if p.ret is None else repr(p.ret), p.status])
        return buf.getvalue()

    def to_gnuplot(self) -> str:
        lines = ["# N ens_kwh_yr savings investment return"]
        for p in self.points:
            if p.ret is not None:
                lines.append(f"{p.n} {p.ens!r} {p.savings!r} {p.investment!r} {p.ret!r}")
        return "\n".join(lines) + "\n"


def _point(n: int, ens_n: float, status: str, arcs, e_ub: float, params: EconomicParams) -> SweepPoint:
    savings = params.energy_cost * (e_ub - ens_n)
    investment = params.switch_cost * n
    return SweepPoint(n, ens_n, savings, investment, savings - investment, status, arcs)


def sweep(base: SapInstance, params: EconomicParams, n_range: Sequence[int], *,
          method: str = "auto", seed: int = 0, workers: int = 1) -> EconomicSweep:
    """One switch allocation per budget, priced as savings minus investment.

    ``method`` is ``dp``, ``heuristic`` or ``auto`` (DP, falling back to the
    heuristic when the DP budget is exceeded). Points that fail are kept and
    marked rather than aborting the sweep.
    """
    n_values = sorted(set(int(n) for n in n_range))
    # E_ub through the same evaluator as every ENS_N, so return(0) cancels exactly
    net = base.net
    e_ub = ens(net, evaluate_iflows(net, switch=np.zeros(net.n_nodes, dtype=bool)))
    solved = {}
    if method in ("dp", "auto"):
        try:
            for n, sol in zip(n_values, solve_exact_dp_sweep(base, n_values)):
                solved[n] = sol
        except BudgetExceeded:
            if method == "dp":
                return EconomicSweep(tuple(SweepPoint(n, None, None, params.switch_cost * n, None,
                                                      "failed: dp budget exceeded")
                                           for n in n_values), e_ub, params)
    elif method != "heuristic":
        raise ValueError(f"unknown method {method!r}")

    todo = [n for n in n_values if n not in solved]

    def run(n):
        try:
            return n, solve_heuristic(base.replace_n(n), seed=seed), None
        except Exception as exc:  # recorded per point
            return n, None, exc

    if todo:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            for n, sol, exc in pool.map(run, todo):
                if sol is None:
                    solved[n] = exc
                else:
                    solved[n] = sol

    points = []
    for n in n_values:
        sol = solved[n]
        if isinstance(sol, Exception):
            points.append(SweepPoint(n, None, None, params.switch_cost * n, None, f"failed: {sol}"))
        else:
            points.append(_point(n, sol.ens, sol.status, sol.switch_arcs, e_ub, params))
    return EconomicSweep(tuple(points), e_ub, params)
