"""Restoration zones backed by distributed generation.

A zone is a connected set of nodes, fenced by switches on every boundary arc,
that a local source can keep energized. Faults outside the zone open the
fence and leave its members supplied; faults inside propagate as usual.
Members therefore only accumulate islacks from the zone's own top node down,
and the ENS load coefficients lose the zone loads wherever a fault from
outside would otherwise have reached them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .evaluation import (IflowState, ReliabilityReport, customer_average, ens_bounds,
                         evaluate_iflows)
from .network import Network, ZoneSpec


class ZoneError(ValueError):
    pass


@dataclass(frozen=True)
class RestorationZone:
    name: str
    members: frozenset[int]
    dg_capacity: float

    @classmethod
    def from_spec(cls, spec: ZoneSpec) -> "RestorationZone":
        if spec.dg_capacity is None:
            raise ZoneError(f"zone {spec.name} declares no DG capacity")
        return cls(spec.name, frozenset(spec.members), spec.dg_capacity)


def zone_top(net: Network, zone: RestorationZone) -> int:
    tops = [m for m in zone.members if int(net.parent[m]) not in zone.members]
    if len(tops) != 1:
        raise ZoneError(f"zone {zone.name} is not connected")
    return tops[0]


def validate_zones(net: Network, zones: Sequence[RestorationZone],
                   switch: np.ndarray | None = None) -> list[int]:
    """Check zone invariants and return each zone's top node."""
    sw = net.switch if switch is None else switch
    seen: set[int] = set()
    tops = []
    for z in zones:
        if not z.members:
            raise ZoneError(f"zone {z.name} is empty")
        if any(not (0 <= m < net.n_nodes) for m in z.members):
            raise ZoneError(f"zone {z.name} names an unknown node")
        if 0 in z.members:
            raise ZoneError(f"zone {z.name} contains the substation")
        if seen & z.members:
            raise ZoneError(f"zone {z.name} overlaps another zone")
        seen |= z.members
        top = zone_top(net, z)
        if not sw[top]:
            raise ZoneError(f"zone {z.name}: boundary arc ({net.label(int(net.parent[top]))}, "
                            f"{net.label(top)}) has no switch")
        for m in z.members:
            for c in net.children(m):
                if c not in z.members and not sw[c]:
                    raise ZoneError(f"zone {z.name}: boundary arc ({net.label(m)}, "
                                    f"{net.label(c)}) has no switch")
        demand = float(net.load[list(z.members)].sum())
        if z.dg_capacity < demand:
            raise ZoneError(f"zone {z.name}: DG capacity {z.dg_capacity} below zone load {demand}")
        tops.append(top)
    return tops


def zones_of(net: Network) -> list[RestorationZone]:
    """Zones declared in the network file."""
    return [RestorationZone.from_spec(s) for s in net.zones]


def effective_coefficients(net: Network, zones: Sequence[RestorationZone],
                           switch: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Load coefficients of the ENS sum with zone loads removed.

    Returns ``(arc_coeff, node_coeff)``; ``arc_coeff[j]`` multiplies the iflow
    of arc ``(parent[j], j)`` and ``node_coeff[i]`` multiplies ``theta_i``.
    Without zones these are ``l~_i - l~_j`` and ``l~_i``.
    """
    tops = validate_zones(net, zones, switch)
    lt = net.summary.downstream_load
    zload = np.zeros(net.n_nodes)
    member_of = np.full(net.n_nodes, -1, dtype=np.int64)
    for k, (z, top) in enumerate(zip(zones, tops)):
        zload[top] = float(net.load[list(z.members)].sum())
        member_of[list(z.members)] = k
    # zone loads summed over tops lying in V_i
    below = net.subtree_sum(zload)
    top_load = np.zeros(net.n_nodes)
    top_load[tops] = zload[tops]

    node_coeff = lt - (below - top_load)
    heads = net.arc_order
    tails = net.parent[heads]
    # a zone topped at the tail and containing the head is the fault's own zone
    own = (member_of[tails] >= 0) & (member_of[tails] == member_of[heads])
    arc_coeff = np.zeros(net.n_nodes)
    arc_coeff[heads] = (lt[tails] - lt[heads]) - (below[tails] - below[heads]) \
        + np.where(own, top_load[tails], 0.0)
    return arc_coeff, node_coeff


def ens_with_coefficients(net: Network, state: IflowState, arc_coeff: np.ndarray,
                          node_coeff: np.ndarray) -> float:
    heads = net.arc_order
    return float(np.dot(arc_coeff[heads], state.iflow[heads]) + np.dot(node_coeff, net.theta))


def zone_full_interruption(net: Network, zones: Sequence[RestorationZone], full: np.ndarray,
                           switch: np.ndarray | None = None) -> np.ndarray:
    """Full interruptions with zone escapes: members keep only in-zone islacks."""
    tops = validate_zones(net, zones, switch)
    out = np.array(full, dtype=float)
    for z, top in zip(zones, tops):
        members = list(z.members)
        out[members] = full[members] - full[int(net.parent[top])]
    return out


def evaluate_with_zones(net: Network, zones: Iterable[RestorationZone] | None = None,
                        switch: np.ndarray | None = None) -> ReliabilityReport:
    """Reliability report honouring restoration zones (file zones by default)."""
    zones = zones_of(net) if zones is None else list(zones)
    state = evaluate_iflows(net, switch=switch)
    arc_coeff, node_coeff = effective_coefficients(net, zones, state.switch)
    u = zone_full_interruption(net, zones, state.full, state.switch)
    freq = evaluate_iflows(net, switch=state.switch, theta=net.failure_rate)
    nu = zone_full_interruption(net, zones, freq.full, state.switch)
    e_lb, e_ub = ens_bounds(net)
    return ReliabilityReport(ens=ens_with_coefficients(net, state, arc_coeff, node_coeff),
                             saidi=customer_average(net, u), saifi=customer_average(net, nu),
                             e_lb=e_lb, e_ub=e_ub, full_interruption=u, frequency=nu,
                             active_zones=tuple(z.name for z in zones))
