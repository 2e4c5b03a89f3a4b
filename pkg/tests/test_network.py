import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iflow.network import (Network, NetworkError, format_network, parse_network, set_switches,
                           summary_csv, switch_mask)

from .conftest import networks


def test_table1_shape(table1):
    assert table1.n_nodes == 9
    assert table1.n_arcs == 8
    assert table1.arcs == [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (2, 6), (3, 7), (4, 8)]
    assert table1.units == "MW"
    assert table1.load[5] == 5000.0


def test_config1_switches(config1):
    assert config1.switch_arcs == [(0, 1)]


def test_single_node():
    net = parse_network("node 0 load=7")
    assert net.n_nodes == 1 and net.n_arcs == 0
    assert net.summary.downstream_load.tolist() == [7.0]


def test_star_downstream_load():
    net = parse_network("node 0\nnode 1 load=1\nnode 2 load=2\nnode 3 load=3\n"
                        "arc 0 1\narc 0 2\narc 0 3\n")
    assert net.summary.downstream_load[0] == 6.0


def test_table1_downstream_load(table1):
    lt = table1.summary.downstream_load / 1000.0
    expected = {1: 14.0, 2: 9.0, 3: 5.0, 4: 2.0, 5: 5.0, 6: 4.0, 7: 3.0, 8: 2.0}
    assert {i: lt[i] for i in expected} == expected
    assert table1.summary.total_load == 14000.0


@pytest.mark.parametrize("text, reason, line", [
    ("", "missing root", None),
    ("# only a comment\n", "missing root", None),
    ("node 0\nnode 1\nnode 2\nnode 3\narc 0 1\narc 1 2\narc 0 3\narc 3 2\n",
     "node 2 has two predecessors", 8),
    ("node 0\nnode 1\nnode 2\narc 0 1\n", "disconnected node 2", 3),
    ("node 0\narc 0 4\n", "arc endpoint 4 undefined", 2),
    ("node 0\nnode 1 load=-1\narc 0 1\n", "negative", 2),
    ("node 0\nnode 0\n", "duplicate node id 0", 2),
    ("node 0\nnode 1\nnode 2\narc 0 1\narc 2 1\n", "two predecessors", 5),
    ("node a\nnode b\narc a b\narc b a\n", "cycle detected", None),
])
def test_parse_errors(text, reason, line):
    with pytest.raises(NetworkError) as exc:
        parse_network(text)
    assert reason in str(exc.value)
    if line is not None:
        assert exc.value.line == line


def test_cycle_detached_from_root():
    # 1 -> 2 -> 1 never reaches the root
    with pytest.raises(NetworkError, match="cycle detected|disconnected"):
        parse_network("node 0\nnode 1\nnode 2\narc 1 2\narc 2 1\n")


def test_implicit_root():
    net = parse_network("node 1 load=2\narc 0 1\n")
    assert net.n_nodes == 2
    assert net.load.tolist() == [0.0, 2.0]


def test_arbitrary_labels():
    net = parse_network("node feeder\nnode b load=1\nnode a load=2\narc feeder a\narc a b\n")
    assert net.label(0) == "feeder"
    assert net.parent[net.index("b")] == net.index("a")
    assert net.summary.downstream_load[0] == 3.0


def test_customers_default():
    net = parse_network("node 0\nnode 1\narc 0 1\n")
    assert not net.has_customers
    assert net.customers.tolist() == [0, 1]


def test_mw_scales_zone_capacity(config3):
    assert [z.dg_capacity for z in config3.zones] == [8000.0, 8000.0]


def test_set_switches(table1, config1, config2):
    c1 = set_switches(table1, [(0, 1)])
    assert c1.switch_arcs == config1.switch_arcs
    c2 = set_switches(table1, [(0, 1), (1, 5), (2, 6), (3, 7), (4, 8)])
    assert c2.switch_arcs == config2.switch_arcs
    assert set_switches(table1, []).switch.sum() == 0
    with pytest.raises(NetworkError, match="unknown arc"):
        switch_mask(table1, [(2, 5)])


def test_summary_csv(table1):
    rows = summary_csv(table1).splitlines()
    assert rows[0] == "node,load,downstream_load,customers"
    assert rows[2].split(",")[2] == "14000.0"


@given(networks(max_nodes=15))
def test_round_trip(net):
    assert parse_network(format_network(net)) == net


@given(networks(max_nodes=15), st.sampled_from(["kW", "MW"]))
def test_round_trip_units(net, units):
    text = format_network(net).replace("units kW", f"units {units}")
    back = parse_network(text)
    assert parse_network(format_network(back)) == back


def _brute_descendants(net, i):
    out = []
    for v in range(net.n_nodes):
        w = v
        while w != -1 and w != i:
            w = int(net.parent[w])
        if w == i:
            out.append(v)
    return sorted(out)


@given(networks(max_nodes=14))
def test_downstream_sets(net):
    lt = net.summary.downstream_load
    for i in range(net.n_nodes):
        desc = _brute_descendants(net, i)
        assert sorted(net.downstream_nodes(i)) == desc
        assert lt[i] == pytest.approx(net.load[desc].sum(), rel=1e-12, abs=1e-12)
        for j in range(net.n_nodes):
            assert net.is_downstream(i, j) == (j in desc)


@given(networks(max_nodes=14))
def test_downstream_load_path_identity(net):
    # each load is counted once per node on its root path
    lt = net.summary.downstream_load
    paths = np.array([len(net.path_from_root(j)) for j in range(net.n_nodes)])
    assert lt.sum() == pytest.approx(float(np.dot(net.load, paths)), rel=1e-12)


@given(networks(max_nodes=14))
def test_orders_are_consistent(net):
    pre, post = net.preorder, net.postorder
    assert sorted(pre) == list(range(net.n_nodes)) == sorted(post)
    assert pre[0] == 0 and post[-1] == 0
    where = {v: k for k, v in enumerate(post)}
    for j in range(1, net.n_nodes):
        assert where[j] < where[int(net.parent[j])]
    assert net.depth[0] == 0


def test_deep_path_traversal():
    n = 200_000
    parent = np.arange(-1, n - 1)
    net = Network.from_parents(parent, np.ones(n), np.zeros(n), np.zeros(n))
    assert net.summary.downstream_load[0] == n
    assert net.depth[-1] == n - 1
