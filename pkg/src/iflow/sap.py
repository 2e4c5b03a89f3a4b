"""Switch allocation: choose at most N switched arcs minimising ENS.

Three routes are provided: an exact dynamic program over the tree, a greedy
plus swap local search for instances beyond the DP budget, and an LP-format
export of the mixed-integer model for external solvers.

Switch budgets count only *free* arcs; ``fixed_switches`` (for instance the
substation breaker) are always present and never charged against ``N``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .evaluation import ens, ens_bounds, evaluate_iflows
from .network import Network

PROVEN_OPTIMAL = "proven-optimal"
HEURISTIC = "heuristic"
GAP = "gap"

DEFAULT_DP_BUDGET = 3e8
DEFAULT_DP_MEMORY = 4e7


class BudgetExceeded(RuntimeError):
    """The exact DP would exceed its work or memory budget."""


def _heads(net: Network, arcs: Iterable[tuple[int, int]]) -> frozenset[int]:
    return frozenset(net.arc_head(int(i), int(j)) for i, j in arcs)


@dataclass(frozen=True, eq=False)
class SapInstance:
    net: Network
    n_switches: int
    fixed_switches: frozenset = field(default_factory=frozenset)
    forbidden_arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "fixed_switches", frozenset(tuple(map(int, a)) for a in self.fixed_switches))
        object.__setattr__(self, "forbidden_arcs", frozenset(tuple(map(int, a)) for a in self.forbidden_arcs))
        if self.n_switches < 0:
            raise ValueError("number of switches must be non-negative")
        _heads(self.net, self.fixed_switches)
        _heads(self.net, self.forbidden_arcs)
        if self.fixed_switches & self.forbidden_arcs:
            raise ValueError("fixed and forbidden arcs overlap")

    @classmethod
    def with_breaker(cls, net: Network, n_switches: int, forbidden_arcs=()) -> "SapInstance":
        breaker = frozenset((0, c) for c in net.children(0))
        return cls(net, n_switches, breaker, frozenset(forbidden_arcs))

    def replace_n(self, n_switches: int) -> "SapInstance":
        return SapInstance(self.net, n_switches, self.fixed_switches, self.forbidden_arcs)

    @property
    def fixed_mask(self) -> np.ndarray:
        mask = np.zeros(self.net.n_nodes, dtype=bool)
        mask[list(_heads(self.net, self.fixed_switches))] = True
        return mask

    @property
    def forbidden_mask(self) -> np.ndarray:
        mask = np.zeros(self.net.n_nodes, dtype=bool)
        mask[list(_heads(self.net, self.forbidden_arcs))] = True
        return mask

    @property
    def free_mask(self) -> np.ndarray:
        mask = ~(self.fixed_mask | self.forbidden_mask)
        mask[0] = False
        return mask


@dataclass(frozen=True)
class SapSolution:
    switch_arcs: tuple[tuple[int, int], ...]
    ens: float
    status: str
    solve_time: float
    gap: float | None = None

    @property
    def n_used(self) -> int:
        return len(self.switch_arcs)


def _verified(inst: SapInstance, mask: np.ndarray, claimed: float, status: str,
              t0: float, gap: float | None = None) -> SapSolution:
    net = inst.net
    n_free = int((mask & inst.free_mask).sum())
    if n_free > inst.n_switches or np.any(inst.fixed_mask & ~mask) or np.any(mask & inst.forbidden_mask):
        raise RuntimeError("solver returned an infeasible placement")
    value = ens(net, evaluate_iflows(net, switch=mask))
    if abs(value - claimed) > 1e-9 * max(1.0, abs(value)):
        raise RuntimeError(f"solver value {claimed!r} disagrees with evaluation {value!r}")
    e_lb, e_ub = ens_bounds(net)
    tol = 1e-9 * max(1.0, e_ub)
    if not (e_lb - tol <= value <= e_ub + tol):
        raise RuntimeError("solution ENS outside the analytic bounds")
    arcs = tuple(sorted((int(net.parent[j]), int(j)) for j in np.flatnonzero(mask)))
    return SapSolution(arcs, value, status, time.perf_counter() - t0, gap)


def big_m(net: Network) -> np.ndarray:
    """``m_i``: total self-interruption below ``i``, the largest possible iflow into ``i``."""
    return net.subtree_sum(net.theta)


# exact dynamic program ------------------------------------------------------

def _minplus(p: np.ndarray, g: np.ndarray, width: int) -> np.ndarray:
    """Row-wise min-plus convolution of (r, a) and (r, b) tables, truncated."""
    w = min(p.shape[1] + g.shape[1] - 1, width)
    out = np.full((p.shape[0], w), np.inf)
    for j in range(min(g.shape[1], w)):
        hi = min(p.shape[1], w - j)
        np.minimum(out[:, j:j + hi], p[:, :hi] + g[:, j:j + 1], out=out[:, j:j + hi])
    return out


def _at(arr: np.ndarray, k: int) -> float:
    return arr[min(k, len(arr) - 1)]


class _TreeDP:
    """Tables ``g[v][row, m]``: least cost of ``V_v`` using at most ``m`` free
    switches in ``V_v`` (arc into ``v`` included), given that ``v`` would join
    the region whose root carries downstream load ``rows(v)[row]``.

    The cost of a placement is the sum over faults of ``theta_k`` times the
    downstream load of the fault's region root, which equals ENS.
    """

    def __init__(self, inst: SapInstance, n_max: int, budget: float, memory: float):
        net = inst.net
        self.net = net
        self.lt = net.summary.downstream_load
        self.theta = net.theta
        self.fixed = inst.fixed_mask
        self.forbidden = inst.forbidden_mask
        self.free = inst.free_mask
        cap = net.subtree_sum(self.free.astype(float)).astype(np.int64)
        self.n_max = int(min(n_max, cap[0]))
        self.width = np.minimum(cap, self.n_max) + 1
        self._plan_rows()
        self._check_budget(budget, memory)
        self._solve()

    def _plan_rows(self):
        net, lt = self.net, self.lt
        par = net.parent.tolist()
        self.child_rows: list[tuple[float, ...]] = [()] * net.n_nodes
        self.child_index: list[dict[float, int]] = [{}] * net.n_nodes
        for v in net.preorder:
            if v == 0 or self.fixed[v]:
                vals = (float(lt[v]),)
            else:
                vals = self.child_rows[par[v]]
                if not self.forbidden[v] and float(lt[v]) not in self.child_index[par[v]]:
                    vals = vals + (float(lt[v]),)
            self.child_rows[v] = vals
            self.child_index[v] = {x: i for i, x in enumerate(vals)}

    def _check_budget(self, budget, memory):
        net = self.net
        par = net.parent.tolist()
        work = 0.0
        entries = 0.0
        merged = np.ones(net.n_nodes, dtype=np.int64)
        for v in net.postorder[:-1]:
            p = par[v]
            r = len(self.child_rows[p])
            entries += r * self.width[v]
            work += r * merged[p] * self.width[v]
            merged[p] = min(merged[p] + self.width[v] - 1, self.n_max + 1)
        self.work, self.entries = work, entries
        if work > budget or entries > memory:
            raise BudgetExceeded(
                f"exact DP needs ~{work:.3g} operations and {entries:.3g} table entries "
                f"(limits {budget:.3g}, {memory:.3g}); use the heuristic or the LP export")

    def _merged(self, v: int, rows=None) -> np.ndarray:
        r = len(self.child_rows[v])
        out = np.zeros((r, 1)) if rows is None else np.zeros((len(rows), 1))
        for c in self.net.children(v):
            g = self.g[c] if rows is None else self.g[c][rows]
            out = _minplus(out, g, self.n_max + 1)
        return out

    def _solve(self):
        net, lt, th = self.net, self.lt, self.theta
        par = net.parent.tolist()
        self.g: list[np.ndarray | None] = [None] * net.n_nodes
        for v in net.postorder:
            merged = self._merged(v)
            if v == 0:
                self.root = th[0] * lt[0] + merged[0]
                break
            rows = np.asarray(self.child_rows[par[v]])
            w = self.width[v]
            table = np.full((len(rows), w), np.inf)
            if not self.fixed[v]:
                a = th[v] * rows[:, None] + merged[:len(rows)]
                table[:, :a.shape[1]] = a
                table[:, a.shape[1]:] = a[:, -1:]
            if not self.forbidden[v]:
                b = th[v] * lt[v] + merged[self.child_index[v][float(lt[v])]]
                shift = 1 if self.free[v] else 0
                bb = np.full(w, np.inf)
                bb[shift:shift + len(b)] = b[:w - shift]
                if shift + len(b) < w:
                    bb[shift + len(b):] = b[-1]
                np.minimum(table, bb[None, :], out=table)
            self.g[v] = table

    def value(self, n: int) -> float:
        return float(_at(self.root, n))

    def placement(self, n: int) -> np.ndarray:
        net, lt, th = self.net, self.lt, self.theta
        mask = self.fixed.copy()
        stack = [(0, 0, min(n, self.n_max))]
        while stack:
            v, row, m = stack.pop()
            if v == 0:
                crow, cm = 0, m
            else:
                rows = self.child_rows[int(net.parent[v])]
                switched = bool(self.fixed[v])
                if not self.fixed[v] and not self.forbidden[v]:
                    bidx = self.child_index[v][float(lt[v])]
                    m_a = self._merged(v, [row])[0]
                    a_val = th[v] * rows[row] + _at(m_a, m)
                    b_val = np.inf
                    if m >= 1:
                        m_b = self._merged(v, [bidx])[0]
                        b_val = th[v] * lt[v] + _at(m_b, m - 1)
                    switched = b_val < a_val
                if switched:
                    mask[v] = True
                    crow = self.child_index[v][float(lt[v])]
                    cm = m - (1 if self.free[v] else 0)
                else:
                    crow, cm = row, m
            kids = net.children(v)
            prefixes = [np.zeros(1)]
            for c in kids:
                prefixes.append(_minplus(prefixes[-1][None, :], self.g[c][crow:crow + 1],
                                         self.n_max + 1)[0])
            mm = min(cm, len(prefixes[-1]) - 1)
            for i in range(len(kids) - 1, -1, -1):
                g = self.g[kids[i]][crow]
                pre = prefixes[i]
                options = [_at(pre, mm - j) + g[j] for j in range(min(mm, len(g) - 1) + 1)]
                j = int(np.argmin(options))
                stack.append((kids[i], crow, j))
                mm -= j
        return mask


def solve_exact_dp_sweep(inst: SapInstance, n_values: Sequence[int], budget: float = DEFAULT_DP_BUDGET,
                         memory: float = DEFAULT_DP_MEMORY) -> list[SapSolution]:
    """Exact optima for several budgets from one set of DP tables."""
    t0 = time.perf_counter()
    dp = _TreeDP(inst, max(n_values), budget, memory)
    out = []
    for n in n_values:
        t1 = time.perf_counter()
        mask = dp.placement(n)
        sub = inst.replace_n(n)
        sol = _verified(sub, mask, dp.value(n), PROVEN_OPTIMAL, t1)
        out.append(SapSolution(sol.switch_arcs, sol.ens, sol.status,
                               sol.solve_time + (t1 - t0) / len(n_values)))
    return out


def solve_exact_dp(inst: SapInstance, budget: float = DEFAULT_DP_BUDGET,
                   memory: float = DEFAULT_DP_MEMORY) -> SapSolution:
    """Provably optimal placement via dynamic programming over the tree."""
    t0 = time.perf_counter()
    dp = _TreeDP(inst, inst.n_switches, budget, memory)
    return _verified(inst, dp.placement(inst.n_switches), dp.value(inst.n_switches), PROVEN_OPTIMAL, t0)


# heuristic -------------------------------------------------------------------

def _region_load(net: Network, mask: np.ndarray) -> np.ndarray:
    lt = net.summary.downstream_load.tolist()
    par = net.parent.tolist()
    sw = mask.tolist()
    out = [0.0] * net.n_nodes
    out[0] = lt[0]
    for v in net.preorder[1:]:
        out[v] = lt[v] if sw[v] else out[par[v]]
    return np.asarray(out)


def _gains(net: Network, mask: np.ndarray, state) -> np.ndarray:
    """Exact ENS reduction from switching each unswitched arc on its own."""
    lt = net.summary.downstream_load
    rl = _region_load(net, mask)
    g = np.zeros(net.n_nodes)
    heads = net.arc_order
    g[heads] = state.iflow[heads] * (rl[net.parent[heads]] - lt[heads])
    g[mask] = -np.inf
    g[0] = -np.inf
    return g


def solve_heuristic(inst: SapInstance, seed: int = 0, max_passes: int = 200) -> SapSolution:
    """Greedy construction followed by first-improvement swap search.

    Adding a switch on arc ``(i, j)`` moves the ``f_ij`` hours of unblocked
    downstream faults from the current region root to ``j``, so every single
    move is scored exactly from one evaluation. ``seed`` fixes only the order
    in which candidates are scanned.
    """
    t0 = time.perf_counter()
    net = inst.net
    rng = np.random.default_rng(seed)
    allowed = inst.free_mask
    mask = inst.fixed_mask.copy()
    order = rng.permutation(net.n_nodes)
    tol = 1e-12
    for _ in range(inst.n_switches):
        state = evaluate_iflows(net, switch=mask)
        g = np.where(allowed, _gains(net, mask, state), -np.inf)[order]
        k = int(np.argmax(g))
        if not g[k] > 0:
            break
        mask[order[k]] = True
    current = ens(net, evaluate_iflows(net, switch=mask))

    for _ in range(max_passes):
        improved = False
        placed = np.flatnonzero(mask & allowed)
        for a in rng.permutation(placed):
            trial = mask.copy()
            trial[a] = False
            state = evaluate_iflows(net, switch=trial)
            base = ens(net, state)
            g = np.where(allowed, _gains(net, trial, state), -np.inf)
            g[a] = -np.inf
            g = g[order]
            k = int(np.argmax(g))
            if g[k] == -np.inf:
                continue
            candidate = base - g[k]
            if candidate < current - tol * max(1.0, abs(current)):
                trial[order[k]] = True
                mask = trial
                current = ens(net, evaluate_iflows(net, switch=mask))
                improved = True
                break
        if not improved:
            break
    return _verified(inst, mask, current, HEURISTIC, t0)


# MILP export -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def export_milp(inst: SapInstance) -> str:
    """CPLEX-LP text of the mixed-integer switch allocation model.

    Variables per arc ``(i, j)``: iflow ``f_i_j``, islack ``F_j`` and switch
    binary ``x_i_j``; node ids are dense. The objective carries ``E_lb`` as a
    constant offset; budgets count only non-fixed arcs.
    """
    net = inst.net
    lt = net.summary.downstream_load
    theta = net.theta
    m = big_m(net)
    e_lb, _ = ens_bounds(net)
    fixed, forbidden = inst.fixed_mask, inst.forbidden_mask
    par = net.parent.tolist()
    heads = net.arc_order.tolist()

    def f(j):
        return f"f_{par[j]}_{j}"

    def x(j):
        return f"x_{par[j]}_{j}"

    lines = [
        "\\ switch allocation: minimise ENS (kWh/year)",
        f"\\ nodes {net.n_nodes} arcs {net.n_arcs} budget {inst.n_switches}",
        f"\\ objective constant E_lb = {_fmt(e_lb)}",
        "Minimize",
    ]
    terms = [f"{_fmt(lt[par[j]] - lt[j])} {f(j)}" for j in heads if lt[par[j]] - lt[j] != 0]
    terms.append(_fmt(e_lb))
    lines.append(" obj: " + " + ".join(terms))
    lines.append("Subject To")
    free = [j for j in heads if not fixed[j]]
    if free:
        lines.append(" card: " + " + ".join(x(j) for j in free) + f" <= {inst.n_switches}")
    else:
        lines.append(f" card: 0 {x(heads[0])} <= {inst.n_switches}" if heads else " card: 0 <= 0")
    kids = {j: [] for j in range(net.n_nodes)}
    for j in heads:
        kids[par[j]].append(j)
    for j in heads:
        expr = f"F_{j} + {f(j)}" + "".join(f" - {f(k)}" for k in kids[j])
        lines.append(f" bal_{j}: {expr} = {_fmt(theta[j])}")
    for j in heads:
        lines.append(f" bigm_{j}: F_{j} - {_fmt(m[j])} {x(j)} <= 0")
    lines.append("Bounds")
    for j in heads:
        lines.append(f" {f(j)} >= 0")
        lines.append(f" F_{j} >= 0")
        if fixed[j]:
            lines.append(f" {x(j)} = 1")
        elif forbidden[j]:
            lines.append(f" {x(j)} = 0")
        else:
            lines.append(f" 0 <= {x(j)} <= 1")
    lines.append("Binaries")
    lines.extend(f" {x(j)}" for j in heads)
    lines.append("End")
    return "\n".join(lines) + "\n"


def read_solution(text: str) -> dict[str, float]:
    """Parse ``name value`` pairs; anything else on a line is ignored."""
    values = {}
    for raw in text.splitlines():
        tokens = raw.split("#", 1)[0].split()
        if len(tokens) < 2:
            continue
        try:
            values[tokens[0]] = float(tokens[1])
        except ValueError:
            continue
    return values


def switches_from_solution(inst: SapInstance, values: dict[str, float]) -> tuple[tuple[int, int], ...]:
    net = inst.net
    out = []
    for j in net.arc_order.tolist():
        i = int(net.parent[j])
        if values.get(f"x_{i}_{j}", 0.0) > 0.5:
            out.append((i, j))
    return tuple(sorted(out))
