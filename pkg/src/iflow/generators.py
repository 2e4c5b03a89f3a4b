"""Random radial networks for property tests and benchmarks."""
from __future__ import annotations

import numpy as np

from .islanding import RestorationZone
from .network import Network


def random_parents(n: int, rng: np.random.Generator, shape: str = "mixed") -> np.ndarray:
    """Parent array of a random arborescence on ``n`` nodes (node 0 the root).

    ``recursive`` attaches each node to a uniform earlier node (shallow trees),
    ``deep`` to one of the few most recent nodes, ``path`` gives a chain and
    ``mixed`` picks one of the first two per instance.
    """
    parent = np.full(n, -1, dtype=np.int64)
    if n <= 1:
        return parent
    if shape == "mixed":
        shape = "recursive" if rng.random() < 0.5 else "deep"
    j = np.arange(1, n)
    if shape == "recursive":
        parent[1:] = np.floor(rng.random(n - 1) * j).astype(np.int64)
    elif shape == "deep":
        back = rng.integers(1, 4, size=n - 1)
        parent[1:] = np.maximum(j - back, 0)
    elif shape == "path":
        parent[1:] = j - 1
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return parent


def random_network(n: int, rng: np.random.Generator, *, shape: str = "mixed",
                   switch_prob: float | None = None, scale: float = 10.0,
                   grid: float | None = None, customers: bool = True,
                   shuffle_children: bool = True) -> Network:
    """Random tree with parameters uniform in ``[0, scale]``.

    With ``grid`` the parameters are rounded to multiples of ``grid``; a
    dyadic grid keeps every sum and product exact in binary floating point.
    """
    parent = random_parents(n, rng, shape)

    def draw():
        x = rng.random(n) * scale
        return np.round(x / grid) * grid if grid else x

    load, lam, t = draw(), draw(), draw()
    if switch_prob is None:
        switch_prob = rng.random()
    switch = rng.random(n) < switch_prob
    switch[0] = False
    order = np.arange(1, n, dtype=np.int64)
    if shuffle_children:
        order = rng.permutation(order)
    cust = rng.integers(0, 5, size=n) if customers else None
    return Network.from_parents(parent, load, lam, t, customers=cust, switch=switch,
                                arc_order=order, has_customers=customers)


def random_zone(net: Network, rng: np.random.Generator, name: str = "z",
                taken: frozenset = frozenset(), grow: float = 0.6):
    """Grow a random connected zone and return it with the switches it needs.

    Returns ``(zone, switch_mask)`` where the mask adds switches on every
    boundary arc, or None when no eligible top node is left.
    """
    free = [v for v in range(1, net.n_nodes) if v not in taken]
    if not free:
        return None
    top = int(rng.choice(free))
    members = {top}
    frontier = [top]
    while frontier:
        v = frontier.pop()
        for c in net.children(v):
            if c not in taken and rng.random() < grow:
                members.add(c)
                frontier.append(c)
    mask = net.switch.copy()
    mask[top] = True
    for m in members:
        for c in net.children(m):
            if c not in members:
                mask[c] = True
    demand = float(net.load[list(members)].sum())
    return RestorationZone(name, frozenset(members), demand * (1.0 + rng.random())), mask


def random_zones(net: Network, rng: np.random.Generator, max_zones: int = 2):
    """Up to ``max_zones`` disjoint random zones; the network gets the needed switches."""
    zones = []
    taken: frozenset = frozenset()
    for k in range(int(rng.integers(0, max_zones + 1))):
        made = random_zone(net, rng, f"z{k}", taken)
        if made is None:
            break
        zone, mask = made
        zones.append(zone)
        taken = taken | zone.members
        net = net._replace_fast(switch=mask)
    return net, zones
