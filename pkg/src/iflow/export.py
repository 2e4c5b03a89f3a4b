"""CSV and Graphviz renderings of an evaluation."""
from __future__ import annotations

import csv
import io

from .evaluation import IflowState
from .network import UNIT_SCALE, Network


def node_report_csv(net: Network, full, frequency) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node", "u_hours", "freq_per_year"])
    for i in range(net.n_nodes):
        w.writerow([net.label(i), repr(float(full[i])), repr(float(frequency[i]))])
    return buf.getvalue()


def arc_report_csv(net: Network, state: IflowState) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["arc", "from", "to", "iflow", "switched"])
    for k, j in enumerate(net.arc_order.tolist()):
        i = int(net.parent[j])
        w.writerow([k, net.label(i), net.label(j), repr(float(state.iflow[j])), int(state.switch[j])])
    return buf.getvalue()


def _color(frac: float) -> str:
    # blue (idle) to red (largest iflow)
    r = int(round(255 * frac))
    return f"#{r:02x}40{255 - r:02x}"


def iflow_dot(net: Network, state: IflowState, name: str = "iflows") -> str:
    """Iflow diagram: edges point upstream, labelled with the iflow in hours/year.

    Nodes show ``(theta, load)`` with the load in the network's display unit;
    switched arcs are dashed and edge colour scales with ``f / f_max``.
    """
    scale = UNIT_SCALE[net.units]
    fmax = state.max_iflow
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle, fontsize=10];']
    for i in range(net.n_nodes):
        lines.append(f'  n{i} [label="{net.label(i)}\\n({net.theta[i]:.3g}, '
                     f'{net.load[i] / scale:.3g})" xlabel="F={state.islack[i]:.3g}"];')
    for j in net.arc_order.tolist():
        i = int(net.parent[j])
        f = float(state.iflow[j])
        frac = f / fmax if fmax > 0 else 0.0
        style = "dashed" if state.switch[j] else "solid"
        lines.append(f'  n{j} -> n{i} [label="{f:.3g}", color="{_color(frac)}", '
                     f'style={style}, penwidth={1 + 3 * frac:.2f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
