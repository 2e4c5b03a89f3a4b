"""Brute-force reference implementations used as ground truth in tests.

Nothing here touches the iflow sweep or the structural summaries: faults are
propagated one at a time up to the first switch, and switch placements are
enumerated exhaustively. Only the raw fields of :class:`Network` are read.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .evaluation import ReliabilityReport
from .network import Network

MAX_COMBINATIONS = 10_000_000


class EnumerationLimit(RuntimeError):
    pass


def _descendants(parent: list[int]) -> list[set[int]]:
    n = len(parent)
    below = [{i} for i in range(n)]
    for j in range(1, n):
        v = parent[j]
        while v != -1:
            below[v].add(j)
            v = parent[v]
    return below


def _region_root(parent: list[int], switch: Sequence[bool], k: int) -> int:
    v = k
    while v != 0 and not switch[v]:
        v = parent[v]
    return v


def _per_node_totals(net: Network, switch, zones, weights) -> np.ndarray:
    parent = net.parent.tolist()
    below = _descendants(parent)
    total = np.zeros(net.n_nodes)
    for k in range(net.n_nodes):
        w = weights[k]
        if w == 0:
            continue
        hit = set(below[_region_root(parent, switch, k)])
        for z in zones:
            if k not in z.members:
                hit -= z.members
        for i in hit:
            total[i] += w
    return total


def _average(net: Network, per_node) -> float | None:
    total = int(net.customers.sum())
    if not net.has_customers or total == 0:
        return None
    return float(sum(int(c) * x for c, x in zip(net.customers, per_node)) / total)


def oracle_indices(net: Network, zones: Iterable = (), switch=None) -> ReliabilityReport:
    """Reliability indices by direct fault simulation.

    Every fault at ``k`` climbs to the nearest switched arc (or the root) and
    interrupts everything below that point for ``lambda_k * t_k`` hours,
    except members of zones that do not contain ``k``.
    """
    zones = list(zones)
    sw = (net.switch if switch is None else switch).tolist()
    lam = net.failure_rate.tolist()
    theta = [a * b for a, b in zip(lam, net.restore_time.tolist())]
    u = _per_node_totals(net, sw, zones, theta)
    nu = _per_node_totals(net, sw, zones, lam)
    ens = float(sum(l * x for l, x in zip(net.load.tolist(), u)))
    n = net.n_nodes
    e_lb = float(np.dot(net.load, _per_node_totals(net, [False] + [True] * (n - 1), [], theta)))
    e_ub = float(np.dot(net.load, _per_node_totals(net, [False] * n, [], theta)))
    return ReliabilityReport(ens=ens, saidi=_average(net, u), saifi=_average(net, nu),
                             e_lb=e_lb, e_ub=e_ub, full_interruption=u, frequency=nu,
                             active_zones=tuple(getattr(z, "name", "") for z in zones))


@dataclass(frozen=True)
class OracleSapResult:
    switch_arcs: tuple[tuple[int, int], ...]
    ens: float
    evaluated: int


def placement_ens_table(net: Network, candidates: Sequence[int], fixed: Sequence[int] = ()) -> np.ndarray:
    """ENS of every subset of ``candidates`` (bit ``b`` = ``candidates[b]``).

    Vectorised over the subset lattice: for each fault, walk the ancestor
    chain and charge the load below the first switched arc met.
    """
    m = len(candidates)
    parent = net.parent.tolist()
    below = _descendants(parent)
    load = net.load.tolist()
    below_load = [sum(load[i] for i in s) for s in below]
    theta = (net.failure_rate * net.restore_time).tolist()
    masks = np.arange(1 << m, dtype=np.int64)
    bit_of = {c: b for b, c in enumerate(candidates)}
    fixed = set(fixed)
    total = np.zeros(1 << m)
    for k in range(net.n_nodes):
        if theta[k] == 0:
            continue
        open_ = np.ones(1 << m, dtype=bool)
        v = k
        cost = np.zeros(1 << m)
        while v != 0:
            if v in fixed:
                cost[open_] = below_load[v]
                open_[:] = False
                break
            if v in bit_of:
                hit = open_ & (((masks >> bit_of[v]) & 1) == 1)
                cost[hit] = below_load[v]
                open_ &= ~hit
            v = parent[v]
        cost[open_] = below_load[0]
        total += theta[k] * cost
    return total


def oracle_sap(net: Network, n_switches: int, fixed: Iterable[tuple[int, int]] = (),
               forbidden: Iterable[tuple[int, int]] = (), rel_tol: float = 1e-12) -> OracleSapResult:
    """Best placement of at most ``n_switches`` switches besides ``fixed``.

    Ties within ``rel_tol`` go to the lexicographically smallest sorted arc list.
    """
    return oracle_sap_all(net, [n_switches], fixed, forbidden, rel_tol)[0]


def oracle_sap_all(net: Network, n_values: Sequence[int], fixed=(), forbidden=(),
                   rel_tol: float = 1e-12) -> list[OracleSapResult]:
    parent = net.parent.tolist()
    fixed_heads = sorted(j for _, j in fixed)
    banned = {j for _, j in forbidden} | set(fixed_heads)
    candidates = [j for j in range(1, net.n_nodes) if j not in banned]
    m = len(candidates)
    top = min(max(n_values), m)
    count = sum(comb(m, s) for s in range(top + 1))
    if count > MAX_COMBINATIONS:
        raise EnumerationLimit(f"{count} placements exceed the enumeration limit {MAX_COMBINATIONS}")
    if m <= 22:
        table = placement_ens_table(net, candidates, fixed_heads)
        sizes = np.array([bin(x).count("1") for x in range(1 << m)])
    else:
        table = sizes = None

    def arcs_of(heads):
        return tuple(sorted((parent[j], j) for j in list(heads) + fixed_heads))

    results = []
    for n_sw in n_values:
        cap = min(n_sw, m)
        if table is not None:
            ok = np.flatnonzero(sizes <= cap)
            vals = table[ok]
            best = vals.min()
            ties = ok[vals <= best + rel_tol * max(1.0, abs(best))]
            options = [arcs_of(candidates[b] for b in range(m) if x >> b & 1) for x in ties.tolist()]
            evaluated = len(ok)
        else:
            options, best, evaluated = [], np.inf, 0
            scored = []
            for s in range(cap + 1):
                for combo in combinations(candidates, s):
                    mask = np.zeros(net.n_nodes, dtype=bool)
                    mask[list(combo) + fixed_heads] = True
                    scored.append((oracle_indices(net, switch=mask).ens, arcs_of(combo)))
                    evaluated += 1
            best = min(s for s, _ in scored)
            options = [a for s, a in scored if s <= best + rel_tol * max(1.0, abs(best))]
        choice = min(options)
        mask = np.zeros(net.n_nodes, dtype=bool)
        mask[[j for _, j in choice]] = True
        results.append(OracleSapResult(choice, oracle_indices(net, switch=mask).ens, evaluated))
    return results
