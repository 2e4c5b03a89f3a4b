"""Radial network data model, file parsing/serialization and structural sweeps.

A network is a rooted arborescence stored as flat arrays indexed by dense node
id, with node 0 the substation. Every non-root node ``j`` owns exactly one
incoming arc ``(parent[j], j)``, so arc-valued quantities (switch flags,
iflows, coefficients) are stored in node-indexed arrays keyed by the arc head.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

UNIT_SCALE = {"kW": 1.0, "MW": 1000.0}


class NetworkError(ValueError):
    """Invalid network data. ``line`` is the 1-based input line, when known."""

    def __init__(self, reason: str, line: int | None = None, node: int | None = None):
        self.reason = reason
        self.line = line
        self.node = node
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


@dataclass(frozen=True)
class Node:
    id: int
    load: float
    failure_rate: float
    restore_time: float
    customers: int


class ZoneSpec(NamedTuple):
    """A ``zone`` line as declared in a network file (validated by islanding)."""

    name: str
    members: tuple[int, ...]
    dg_capacity: float | None


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable radial network.

    ``switch[j]`` flags membership of arc ``(parent[j], j)`` in the switch set;
    ``switch[0]`` is always False. ``arc_order`` lists arc heads in input order
    and fixes the child-list order used by every traversal.
    """

    parent: np.ndarray
    load: np.ndarray
    failure_rate: np.ndarray
    restore_time: np.ndarray
    customers: np.ndarray
    switch: np.ndarray
    arc_order: np.ndarray
    labels: tuple[str, ...] | None = None
    has_customers: bool = False
    units: str = "kW"
    zones: tuple[ZoneSpec, ...] = ()

    def __post_init__(self):
        n = len(self.parent)
        if n == 0:
            raise NetworkError("missing root")
        for name in ("load", "failure_rate", "restore_time", "customers", "switch"):
            if len(getattr(self, name)) != n:
                raise NetworkError(f"{name} has length {len(getattr(self, name))}, expected {n}")
        if len(self.arc_order) != n - 1:
            raise NetworkError(f"expected {n - 1} arcs, got {len(self.arc_order)}")
        if self.labels is not None and len(self.labels) != n:
            raise NetworkError("label count does not match node count")
        if self.parent[0] != -1:
            raise NetworkError("root 0 has a predecessor", node=0)
        if n > 1:
            orphans = np.flatnonzero(self.parent[1:] < 0)
            if orphans.size:
                raise NetworkError(f"disconnected node {self.label(int(orphans[0]) + 1)}",
                                   node=int(orphans[0]) + 1)
            if self.parent.max() >= n:
                raise NetworkError("arc endpoint undefined")
            if len(np.unique(self.arc_order)) != n - 1 or self.arc_order.min() < 1:
                raise NetworkError("arc order must list every non-root node once")
        for name in ("load", "failure_rate", "restore_time", "customers"):
            arr = getattr(self, name)
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                bad = int(np.flatnonzero(~(arr >= 0) | ~np.isfinite(arr))[0])
                raise NetworkError(f"negative or non-finite {name} at node {self.label(bad)}", node=bad)
        if self.switch[0]:
            raise NetworkError("the root has no incoming arc to switch")
        if self.units not in UNIT_SCALE:
            raise NetworkError(f"unknown units {self.units!r}")
        # reachability check; raises on cycles
        self._traversal  # noqa: B018

    # construction helpers -------------------------------------------------

    @classmethod
    def from_parents(cls, parent, load, failure_rate, restore_time, customers=None,
                     switch=None, **kwargs) -> "Network":
        parent = np.asarray(parent, dtype=np.int64)
        n = len(parent)
        if customers is None:
            customers = np.ones(n, dtype=np.int64)
            customers[:1] = 0
        if switch is None:
            switch = np.zeros(n, dtype=bool)
        kwargs.setdefault("arc_order", np.arange(1, n, dtype=np.int64))
        return cls(parent=parent,
                   load=np.asarray(load, dtype=float),
                   failure_rate=np.asarray(failure_rate, dtype=float),
                   restore_time=np.asarray(restore_time, dtype=float),
                   customers=np.asarray(customers, dtype=np.int64),
                   switch=np.asarray(switch, dtype=bool),
                   **kwargs)

    def _replace_fast(self, **changes) -> "Network":
        # same topology: keep cached traversals instead of re-validating
        new = object.__new__(Network)
        new.__dict__.update(self.__dict__)
        new.__dict__.update(changes)
        return new

    # basic accessors ------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def n_arcs(self) -> int:
        return len(self.parent) - 1

    def label(self, i: int) -> str:
        return str(i) if self.labels is None else self.labels[i]

    @cached_property
    def _label_index(self) -> dict[str, int]:
        if self.labels is None:
            return {str(i): i for i in range(self.n_nodes)}
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise NetworkError(f"unknown node {label}") from None

    def node(self, i: int) -> Node:
        return Node(i, float(self.load[i]), float(self.failure_rate[i]),
                    float(self.restore_time[i]), int(self.customers[i]))

    @property
    def arcs(self) -> list[tuple[int, int]]:
        return [(int(self.parent[j]), int(j)) for j in self.arc_order]

    @property
    def switch_arcs(self) -> list[tuple[int, int]]:
        return sorted((int(self.parent[j]), int(j)) for j in np.flatnonzero(self.switch))

    def arc_head(self, i: int, j: int) -> int:
        """Return ``j`` if ``(i, j)`` is an arc, else raise."""
        if not (0 < j < self.n_nodes) or self.parent[j] != i:
            raise NetworkError(f"unknown arc ({self.label(i) if 0 <= i < self.n_nodes else i}, "
                               f"{self.label(j) if 0 <= j < self.n_nodes else j})")
        return j

    @cached_property
    def theta(self) -> np.ndarray:
        """Self-interruption, hours/year."""
        return self.failure_rate * self.restore_time

    @cached_property
    def _children_csr(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n_nodes
        heads = self.arc_order
        tails = self.parent[heads]
        order = np.argsort(tails, kind="stable")
        idx = heads[order]
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=n), out=ptr[1:])
        return ptr, idx

    def children(self, i: int) -> list[int]:
        ptr, idx = self._children_csr
        return idx[ptr[i]:ptr[i + 1]].tolist()

    @cached_property
    def _traversal(self) -> tuple[list[int], list[int]]:
        """Depth-first (preorder, postorder) from the root, explicit stack."""
        n = self.n_nodes
        ptr, idx = self._children_csr
        ptr_l = ptr.tolist()
        idx_l = idx.tolist()
        nxt = ptr_l[:-1]
        pre = [0]
        post = []
        stack = [0]
        while stack:
            v = stack[-1]
            k = nxt[v]
            if k < ptr_l[v + 1]:
                nxt[v] = k + 1
                c = idx_l[k]
                pre.append(c)
                stack.append(c)
            else:
                stack.pop()
                post.append(v)
        if len(post) != n:
            seen = np.zeros(n, dtype=bool)
            seen[post] = True
            bad = int(np.flatnonzero(~seen)[0])
            raise NetworkError(f"cycle detected involving node {self.label(bad)}", node=bad)
        return pre, post

    @property
    def preorder(self) -> list[int]:
        return self._traversal[0]

    @property
    def postorder(self) -> list[int]:
        return self._traversal[1]

    @cached_property
    def _layouts(self) -> tuple[np.ndarray, list[int], np.ndarray, list[int]]:
        """(post, parent position in post, pre, parent position in pre).

        Sweeps run over positions rather than node ids so consecutive steps
        touch neighbouring memory.
        """
        pre_l, post_l = self._traversal
        n = self.n_nodes
        out = []
        for order in (np.asarray(post_l, dtype=np.int64), np.asarray(pre_l, dtype=np.int64)):
            pos = np.empty(n, dtype=np.int64)
            pos[order] = np.arange(n)
            ppos = pos[self.parent[order]]
            ppos[order == 0] = -1
            out += [order, ppos.tolist()]
        return tuple(out)

    @cached_property
    def depth(self) -> np.ndarray:
        d = [0] * self.n_nodes
        par = self.parent.tolist()
        for v in self.preorder[1:]:
            d[v] = d[par[v]] + 1
        return np.asarray(d, dtype=np.int64)

    @cached_property
    def _intervals(self) -> tuple[np.ndarray, np.ndarray]:
        # V_i is preorder[tin[i]:tout[i]]
        n = self.n_nodes
        pre = self.preorder
        tin = np.empty(n, dtype=np.int64)
        tin[pre] = np.arange(n)
        size = [1] * n
        par = self.parent.tolist()
        for v in self.postorder[:-1]:
            size[par[v]] += size[v]
        return tin, tin + np.asarray(size, dtype=np.int64)

    def is_downstream(self, i: int, j: int) -> bool:
        """True when ``j`` lies in ``V_i`` (``i`` itself included)."""
        tin, tout = self._intervals
        return bool(tin[i] <= tin[j] < tout[i])

    def downstream_nodes(self, i: int) -> list[int]:
        tin, tout = self._intervals
        return self.preorder[tin[i]:tout[i]]

    def path_from_root(self, j: int) -> list[int]:
        path = [j]
        while path[-1] != 0:
            path.append(int(self.parent[path[-1]]))
        return path[::-1]

    def subtree_sum(self, values) -> np.ndarray:
        """Bottom-up sum of ``values`` over every downstream set ``V_i``."""
        acc = np.asarray(values, dtype=float).tolist()
        par = self.parent.tolist()
        for v in self.postorder[:-1]:
            acc[par[v]] += acc[v]
        return np.asarray(acc)

    @cached_property
    def summary(self) -> "StructuralSummary":
        return structural_summary(self)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        arrays = ("parent", "load", "failure_rate", "restore_time", "customers", "switch", "arc_order")
        return (all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
                and [self.label(i) for i in range(self.n_nodes)]
                == [other.label(i) for i in range(other.n_nodes)]
                and self.has_customers == other.has_customers
                and self.zones == other.zones)

    __hash__ = None


@dataclass(frozen=True)
class StructuralSummary:
    downstream_load: np.ndarray
    total_load: float
    total_customers: int
    _net: Network

    def downstream_nodes(self, i: int) -> list[int]:
        return self._net.downstream_nodes(i)


def structural_summary(net: Network) -> StructuralSummary:
    lt = net.subtree_sum(net.load)
    return StructuralSummary(downstream_load=lt, total_load=float(lt[0]),
                             total_customers=int(net.customers.sum()), _net=net)


def set_switches(net: Network, switch_arcs: Iterable[tuple[int, int]]) -> Network:
    """Return ``net`` with its switch set replaced by ``switch_arcs`` (dense ids)."""
    mask = np.zeros(net.n_nodes, dtype=bool)
    for i, j in switch_arcs:
        mask[net.arc_head(int(i), int(j))] = True
    return net._replace_fast(switch=mask)


def switch_mask(net: Network, switch_arcs: Iterable[tuple[int, int]]) -> np.ndarray:
    mask = np.zeros(net.n_nodes, dtype=bool)
    for i, j in switch_arcs:
        mask[net.arc_head(int(i), int(j))] = True
    return mask


# file format ---------------------------------------------------------------

_NODE_KEYS = {"load": "load", "lambda": "failure_rate", "t": "restore_time", "customers": "customers"}


def _kv(tokens, lineno):
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or not value:
            raise NetworkError(f"expected key=value, got {tok!r}", lineno)
        if key in out:
            raise NetworkError(f"repeated key {key!r}", lineno)
        out[key] = value
    return out


def _number(value, key, lineno, integer=False):
    try:
        x = int(value) if integer else float(value)
    except ValueError:
        raise NetworkError(f"bad value for {key}: {value!r}", lineno) from None
    if not np.isfinite(x):
        raise NetworkError(f"non-finite {key}", lineno)
    if x < 0:
        raise NetworkError(f"negative parameter {key}={value}", lineno)
    return x


def parse_network(text: str) -> Network:
    """Parse network-file text into a validated :class:`Network`."""
    units = None
    nodes: dict[str, dict] = {}
    node_line: dict[str, int] = {}
    arcs: list[tuple[str, str, bool, int]] = []
    zones: list[tuple[str, list[str], float | None, int]] = []
    any_customers = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *rest = line.split()
        if kind == "units":
            if units is not None:
                raise NetworkError("repeated units header", lineno)
            if len(rest) != 1 or rest[0] not in UNIT_SCALE:
                raise NetworkError("units must be kW or MW", lineno)
            units = rest[0]
        elif kind == "node":
            if not rest:
                raise NetworkError("node line without id", lineno)
            label, params = rest[0], _kv(rest[1:], lineno)
            if label in nodes:
                raise NetworkError(f"duplicate node id {label}", lineno)
            rec = {}
            for key, value in params.items():
                if key not in _NODE_KEYS:
                    raise NetworkError(f"unknown node parameter {key!r}", lineno)
                rec[_NODE_KEYS[key]] = _number(value, key, lineno, integer=key == "customers")
            any_customers |= "customers" in rec
            nodes[label] = rec
            node_line[label] = lineno
        elif kind == "arc":
            if len(rest) not in (2, 3) or (len(rest) == 3 and rest[2] != "switch"):
                raise NetworkError("expected: arc <from> <to> [switch]", lineno)
            arcs.append((rest[0], rest[1], len(rest) == 3, lineno))
        elif kind == "zone":
            if len(rest) < 2:
                raise NetworkError("expected: zone <name> nodes=<id,...> [dg=<kW>]", lineno)
            params = _kv(rest[1:], lineno)
            if "nodes" not in params or set(params) - {"nodes", "dg"}:
                raise NetworkError("zone needs nodes=<list> and optional dg=<kW>", lineno)
            dg = _number(params["dg"], "dg", lineno) if "dg" in params else None
            zones.append((rest[0], params["nodes"].split(","), dg, lineno))
        else:
            raise NetworkError(f"unknown directive {kind!r}", lineno)

    units = units or "kW"
    scale = UNIT_SCALE[units]

    # an undeclared node 0 acting as a source is the implicit all-zero root
    if "0" not in nodes and any(a[0] == "0" for a in arcs):
        nodes = {"0": {}, **nodes}
        node_line["0"] = None
    if not nodes:
        raise NetworkError("missing root")

    pred: dict[str, str] = {}
    for src, dst, _, lineno in arcs:
        for end in (src, dst):
            if end not in nodes:
                raise NetworkError(f"arc endpoint {end} undefined", lineno)
        if src == dst:
            raise NetworkError(f"cycle detected: self-loop at node {src}", lineno)
        if dst in pred:
            raise NetworkError(f"node {dst} has two predecessors", lineno)
        pred[dst] = src

    if "0" in nodes:
        root = "0"
        if root in pred:
            line = next(a[3] for a in arcs if a[1] == root)
            raise NetworkError("root 0 has a predecessor (cycle detected)", line)
    else:
        roots = [lab for lab in nodes if lab not in pred]
        if not roots:
            raise NetworkError("missing root: every node has a predecessor (cycle detected)")
        root = roots[0]
    for lab in nodes:
        if lab != root and lab not in pred:
            raise NetworkError(f"disconnected node {lab}", node_line[lab])

    labels = [root] + [lab for lab in nodes if lab != root]
    ids = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    parent = np.full(n, -1, dtype=np.int64)
    switch = np.zeros(n, dtype=bool)
    for src, dst, sw, _ in arcs:
        parent[ids[dst]] = ids[src]
        switch[ids[dst]] = sw

    def column(key, default=0.0):
        return np.array([nodes[lab].get(key, default) for lab in labels], dtype=float)

    if any_customers:
        customers = column("customers", 0).astype(np.int64)
    else:
        customers = np.ones(n, dtype=np.int64)
        customers[0] = 0

    zone_specs = []
    seen = set()
    for name, members, dg, lineno in zones:
        if name in seen:
            raise NetworkError(f"duplicate zone {name}", lineno)
        seen.add(name)
        for m in members:
            if m not in ids:
                raise NetworkError(f"zone {name} names unknown node {m}", lineno)
        zone_specs.append(ZoneSpec(name, tuple(ids[m] for m in members),
                                   None if dg is None else dg * scale))

    try:
        return Network(parent=parent, load=column("load") * scale,
                       failure_rate=column("failure_rate"), restore_time=column("restore_time"),
                       customers=customers, switch=switch,
                       arc_order=np.array([ids[a[1]] for a in arcs], dtype=np.int64),
                       labels=tuple(labels), has_customers=any_customers, units=units,
                       zones=tuple(zone_specs))
    except NetworkError as err:
        if err.node is not None and err.line is None:
            line = next((a[3] for a in arcs if a[1] == labels[err.node]), None)
            if line is None:
                line = node_line.get(labels[err.node])
            raise NetworkError(err.reason, line, err.node) from None
        raise


def read_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def _exact_in(values: np.ndarray, scale: float) -> bool:
    return all(float(repr(v / scale)) * scale == v for v in values.tolist())


def format_network(net: Network) -> str:
    """Serialize to the line-oriented network format (round-trips exactly)."""
    units = net.units
    loads = [net.load] + [np.array([z.dg_capacity]) for z in net.zones if z.dg_capacity is not None]
    if not all(_exact_in(v, UNIT_SCALE[units]) for v in loads):
        units = "kW"
    scale = UNIT_SCALE[units]
    out = [f"units {units}"]
    for i in range(net.n_nodes):
        parts = [f"node {net.label(i)}", f"load={float(net.load[i]) / scale!r}",
                 f"lambda={float(net.failure_rate[i])!r}", f"t={float(net.restore_time[i])!r}"]
        if net.has_customers:
            parts.append(f"customers={int(net.customers[i])}")
        out.append(" ".join(parts))
    for j in net.arc_order.tolist():
        sw = " switch" if net.switch[j] else ""
        out.append(f"arc {net.label(int(net.parent[j]))} {net.label(j)}{sw}")
    for z in net.zones:
        line = f"zone {z.name} nodes={','.join(net.label(m) for m in z.members)}"
        if z.dg_capacity is not None:
            line += f" dg={z.dg_capacity / scale!r}"
        out.append(line)
    return "\n".join(out) + "\n"


def summary_csv(net: Network) -> str:
    """CSV of the structural summary; loads in kW."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "load", "downstream_load", "customers"])
    lt = net.summary.downstream_load
    for i in range(net.n_nodes):
        w.writerow([net.label(i), repr(float(net.load[i])), repr(float(lt[i])), int(net.customers[i])])
    return buf.getvalue()
