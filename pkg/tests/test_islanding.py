import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iflow.evaluation import ens, ens_from_full_interruption, evaluate_iflows
from iflow.generators import random_network, random_zone, random_zones
from iflow.islanding import (RestorationZone, ZoneError, effective_coefficients,
                             evaluate_with_zones, validate_zones, zones_of)
from iflow.network import Network, set_switches
from iflow.oracle import oracle_indices

from .conftest import networks


def test_config3(config3):
    rep = evaluate_with_zones(config3)
    assert rep.ens == pytest.approx(18400.0, rel=1e-12)
    assert rep.active_zones == ("island_a", "island_b")
    ref = oracle_indices(config3, zones_of(config3))
    assert ref.ens == pytest.approx(18400.0, rel=1e-12)
    np.testing.assert_allclose(rep.full_interruption, ref.full_interruption, atol=1e-12)
    assert float(np.dot(config3.load, rep.full_interruption)) == pytest.approx(18400.0, rel=1e-12)


def test_config3_without_zones_is_plain_evaluation(config3):
    assert evaluate_with_zones(config3, zones=[]).ens == \
        pytest.approx(ens(config3, evaluate_iflows(config3)), rel=1e-12)


def test_config2_no_zones(config2):
    assert evaluate_with_zones(config2, zones=[]).ens == pytest.approx(54800.0, rel=1e-12)


@given(networks(max_nodes=12))
def test_empty_zone_identity(net):
    arc_coeff, node_coeff = effective_coefficients(net, [])
    lt = net.summary.downstream_load
    heads = net.arc_order
    np.testing.assert_array_equal(arc_coeff[heads], lt[net.parent[heads]] - lt[heads])
    np.testing.assert_array_equal(node_coeff, lt)


def _zone(members, cap=1e9, name="z"):
    return RestorationZone(name, frozenset(members), cap)


@pytest.mark.parametrize("zone, switches, message", [
    (_zone([]), [], "empty"),
    (_zone([0, 1]), [(0, 1)], "substation"),
    (_zone([2, 5]), [(1, 2), (1, 5)], "not connected"),
    (_zone([2, 6]), [(1, 2)], "boundary arc (2, 3)"),
    (_zone([2, 6]), [(2, 3)], "boundary arc (1, 2)"),
    (_zone([2, 6], cap=3999.0), [(1, 2), (2, 3)], "DG capacity"),
])
def test_zone_validation(table1, zone, switches, message):
    net = set_switches(table1, switches)
    with pytest.raises(ZoneError, match=message.replace("(", r"\(").replace(")", r"\)")):
        validate_zones(net, [zone])


def test_overlapping_zones(table1):
    net = set_switches(table1, [(1, 2), (2, 3), (3, 4)])
    with pytest.raises(ZoneError, match="overlaps"):
        validate_zones(net, [_zone([2, 6], name="a"), _zone([2, 6, 3, 7], name="b")])


def test_whole_network_zone(table1):
    members = range(1, table1.n_nodes)
    net = set_switches(table1, [(0, 1)])
    zone = _zone(members)
    rep = evaluate_with_zones(net, [zone])
    ref = oracle_indices(net, [zone])
    assert rep.ens == pytest.approx(ref.ens, rel=1e-12)
    # the substation carries no failures here, so the zone changes nothing
    assert rep.ens == pytest.approx(84000.0, rel=1e-12)


def test_whole_network_zone_escapes_root_faults(table1):
    lam = table1.failure_rate.copy()
    t = table1.restore_time.copy()
    lam[0], t[0] = 1.0, 1.0
    net = Network.from_parents(table1.parent, table1.load, lam, t, switch=table1.switch,
                               arc_order=table1.arc_order)
    net = set_switches(net, [(0, 1)])
    zone = _zone(range(1, net.n_nodes))
    with_zone = evaluate_with_zones(net, [zone]).ens
    assert with_zone == pytest.approx(oracle_indices(net, [zone]).ens, rel=1e-12)
    assert with_zone == pytest.approx(84000.0, rel=1e-12)
    assert ens(net, evaluate_iflows(net)) == pytest.approx(84000.0 + 14000.0, rel=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_random_zone_matches_oracle(seed, n):
    rng = np.random.default_rng(seed)
    net, zones = random_zones(random_network(n, rng), rng, max_zones=3)
    rep = evaluate_with_zones(net, zones)
    ref = oracle_indices(net, zones)
    scale = max(1.0, ref.ens)
    assert abs(rep.ens - ref.ens) <= 1e-9 * scale
    assert abs(float(np.dot(net.load, rep.full_interruption)) - ref.ens) <= 1e-9 * scale
    np.testing.assert_allclose(rep.full_interruption, ref.full_interruption, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(rep.frequency, ref.frequency, rtol=1e-12, atol=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_zones_only_reduce_ens(seed, n):
    rng = np.random.default_rng(seed)
    net, zones = random_zones(random_network(n, rng), rng)
    plain = ens_from_full_interruption(net, evaluate_iflows(net))
    with_zones = evaluate_with_zones(net, zones).ens
    assert with_zones <= plain + 1e-9 * max(1.0, plain)
    assert with_zones >= -1e-9


def test_random_zone_is_valid():
    rng = np.random.default_rng(3)
    for _ in range(50):
        net = random_network(10, rng)
        made = random_zone(net, rng)
        zone, mask = made
        validate_zones(net, [zone], mask)
