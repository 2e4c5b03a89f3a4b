"""Interruption-flow evaluation: iflows, islacks, full interruptions and indices.

All interruption quantities are hours/year (or interruptions/year when the
evaluation is run on failure rates); ENS is kWh/year because loads are kW.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network


@dataclass(frozen=True, eq=False)
class IflowState:
    """Result of one evaluation for a fixed switch set.

    Arc quantities are indexed by arc head: ``iflow[j]`` is ``f_ij`` for
    ``i = parent[j]``; ``iflow[0]`` is unused and zero. ``islack[0]`` is the
    root islack ``F_0``.
    """

    iflow: np.ndarray
    islack: np.ndarray
    downstream: np.ndarray
    full: np.ndarray
    switch: np.ndarray

    def arc_iflows(self, net: Network) -> dict[tuple[int, int], float]:
        return {(int(net.parent[j]), int(j)): float(self.iflow[j]) for j in net.arc_order}

    @property
    def max_iflow(self) -> float:
        return float(self.iflow.max()) if len(self.iflow) else 0.0


def evaluate_iflows(net: Network, switch: np.ndarray | None = None,
                    theta: np.ndarray | None = None) -> IflowState:
    """Compute iflows by one depth-first sweep, then islacks and full interruptions.

    ``switch`` overrides ``net.switch`` without rebuilding the network and
    ``theta`` overrides the self-interruptions (pass failure rates to obtain
    interruption frequencies instead of durations).

    Backtracking over arc ``(i, j)`` either blocks the downstream interruption
    of ``j`` at a switch, leaving it as the islack ``F_j``, or adds it to
    ``i`` and records it as the iflow ``f_ij``. The postorder visits each
    node's children in child-list order, so sums accumulate in that order.
    """
    n = net.n_nodes
    sw_arr = np.asarray(net.switch if switch is None else switch, dtype=bool)
    th_arr = net.theta if theta is None else np.asarray(theta, dtype=float)
    post, post_par, pre, pre_par = net._layouts
    # positions in postorder; the root is last
    sw = sw_arr[post].tolist()
    down = th_arr[post].tolist()
    f = [0.0] * n
    slack = [0.0] * n
    for k in range(n - 1):
        if sw[k]:
            slack[k] = down[k]
        else:
            f[k] = down[k]
            down[post_par[k]] += down[k]
    slack[n - 1] = down[n - 1]
    iflow = np.empty(n)
    islack = np.empty(n)
    downstream = np.empty(n)
    iflow[post] = f
    islack[post] = slack
    downstream[post] = down
    # positions in preorder; the root is first
    s = islack[pre].tolist()
    u = [0.0] * n
    u[0] = s[0]
    for k in range(1, n):
        u[k] = u[pre_par[k]] + s[k]
    full = np.empty(n)
    full[pre] = u
    return IflowState(iflow=iflow, islack=islack, downstream=downstream, full=full, switch=sw_arr.copy())


def node_balance_residual(net: Network, state: IflowState, theta: np.ndarray | None = None) -> np.ndarray:
    """``f_ij + F_j - theta_j - sum_k f_jk`` per node (root: with ``f = 0``)."""
    th = net.theta if theta is None else theta
    out_flow = np.zeros(net.n_nodes)
    heads = net.arc_order
    np.add.at(out_flow, net.parent[heads], state.iflow[heads])
    return state.iflow + state.islack - th - out_flow


def ens(net: Network, state: IflowState) -> float:
    """ENS from iflows: arc terms weighted by load differences plus the constant."""
    lt = net.summary.downstream_load
    heads = net.arc_order
    arc_terms = (lt[net.parent[heads]] - lt[heads]) * state.iflow[heads]
    return float(arc_terms.sum() + (lt * net.theta).sum())


def ens_from_full_interruption(net: Network, state: IflowState) -> float:
    """ENS as the load-weighted sum of full interruptions."""
    return float(np.dot(net.load, state.full))


def ens_bounds(net: Network) -> tuple[float, float]:
    """Return ``(e_lb, e_ub)``: every arc switched vs. no switch at all."""
    lt = net.summary.downstream_load
    e_lb = float((lt * net.theta).sum())
    e_ub = float(lt[0] * net.theta.sum())
    return e_lb, e_ub


@dataclass(frozen=True, eq=False)
class ReliabilityReport:
    ens: float
    saidi: float | None
    saifi: float | None
    e_lb: float
    e_ub: float
    full_interruption: np.ndarray
    frequency: np.ndarray
    active_zones: tuple[str, ...] = ()

    @property
    def indices_available(self) -> bool:
        return self.saidi is not None


def customer_average(net: Network, per_node: np.ndarray) -> float | None:
    """Customer-weighted mean of a per-node quantity, or None without customer data."""
    total = int(net.customers.sum())
    if not net.has_customers or total == 0:
        return None
    return float(np.dot(net.customers, per_node) / total)


def reliability_report(net: Network, state: IflowState | None = None) -> ReliabilityReport:
    """ENS, SAIDI, SAIFI and the ENS bounds for the network's switch set.

    SAIFI reuses the flow sweep with failure rates in place of
    self-interruptions, so switches contain frequencies exactly as they
    contain durations.
    """
    if state is None:
        state = evaluate_iflows(net)
    freq = evaluate_iflows(net, switch=state.switch, theta=net.failure_rate)
    e_lb, e_ub = ens_bounds(net)
    return ReliabilityReport(ens=ens(net, state), saidi=customer_average(net, state.full),
                             saifi=customer_average(net, freq.full), e_lb=e_lb, e_ub=e_ub,
                             full_interruption=state.full, frequency=freq.full)
