import re

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iflow.evaluation import ens, ens_bounds, evaluate_iflows
from iflow.generators import random_network
from iflow.oracle import oracle_sap, oracle_sap_all
from iflow.sap import (HEURISTIC, PROVEN_OPTIMAL, BudgetExceeded, SapInstance, big_m, export_milp,
                       read_solution, solve_exact_dp, solve_exact_dp_sweep, solve_heuristic,
                       switches_from_solution)

from .conftest import DYADIC

TABLE1_OPTIMA = [84000.0, 55200.0, 43200.0, 39600.0, 36000.0, 34000.0, 32400.0, 32400.0, 32400.0]


def test_dp_table1_all_budgets(table1):
    for n, expected in enumerate(TABLE1_OPTIMA):
        sol = solve_exact_dp(SapInstance(table1, n))
        assert sol.ens == pytest.approx(expected, rel=1e-12)
        assert sol.status == PROVEN_OPTIMAL
        assert sol.n_used <= n
        assert sol.ens == pytest.approx(oracle_sap(table1, n).ens, rel=1e-12)


def test_breaker_only(table1):
    sol = solve_exact_dp(SapInstance.with_breaker(table1, 0))
    assert sol.switch_arcs == ((0, 1),)
    assert sol.ens == pytest.approx(84000.0, rel=1e-12)


def test_breaker_plus_four_beats_config2(table1):
    inst = SapInstance.with_breaker(table1, 4)
    ref = oracle_sap(table1, 4, fixed=[(0, 1)])
    sol = solve_exact_dp(inst)
    assert sol.ens == pytest.approx(ref.ens, rel=1e-12)
    assert sol.ens <= 54800.0
    heur = solve_heuristic(inst)
    assert sol.ens - 1e-9 <= heur.ens <= 54800.0


def test_all_arcs_reach_lower_bound(table1):
    e_lb, e_ub = ens_bounds(table1)
    assert solve_exact_dp(SapInstance(table1, table1.n_arcs)).ens == pytest.approx(e_lb, rel=1e-12)
    assert solve_exact_dp(SapInstance(table1, 0)).ens == pytest.approx(e_ub, rel=1e-12)


def test_forbidden_arcs_respected(table1):
    forbidden = [(1, 2), (2, 6)]
    sol = solve_exact_dp(SapInstance(table1, 8, forbidden_arcs=forbidden))
    assert not set(forbidden) & set(sol.switch_arcs)
    ref = oracle_sap(table1, 8, forbidden=forbidden)
    assert sol.ens == pytest.approx(ref.ens, rel=1e-12)


def test_invalid_instances(table1):
    with pytest.raises(ValueError):
        SapInstance(table1, -1)
    with pytest.raises(ValueError):
        SapInstance(table1, 1, fixed_switches=[(0, 1)], forbidden_arcs=[(0, 1)])


def test_sweep_matches_single_solves(table1):
    sols = solve_exact_dp_sweep(SapInstance(table1, 0), range(9))
    assert [s.ens for s in sols] == pytest.approx(TABLE1_OPTIMA, rel=1e-12)


def test_budget_exceeded():
    net = random_network(400, np.random.default_rng(0), shape="recursive")
    with pytest.raises(BudgetExceeded):
        solve_exact_dp(SapInstance(net, 100), budget=1e4)


@given(st.integers(0, 2**32 - 1), st.integers(1, 11), st.booleans())
def test_dp_equals_oracle(seed, n, breaker):
    rng = np.random.default_rng(seed)
    net = random_network(n, rng, grid=DYADIC)
    fixed = [(0, c) for c in net.children(0)] if breaker else []
    base = SapInstance(net, 0, frozenset(fixed))
    n_values = list(range(net.n_arcs + 1))
    refs = oracle_sap_all(net, n_values, fixed=fixed)
    sols = solve_exact_dp_sweep(base, n_values)
    values = [s.ens for s in sols]
    assert values == [r.ens for r in refs]
    assert all(b <= a for a, b in zip(values, values[1:]))


@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(0, 6))
def test_heuristic_bounds_and_determinism(seed, n, budget):
    net = random_network(n, np.random.default_rng(seed))
    inst = SapInstance(net, budget)
    heur = solve_heuristic(inst, seed=seed)
    again = solve_heuristic(inst, seed=seed)
    assert (heur.switch_arcs, heur.ens) == (again.switch_arcs, again.ens)
    assert heur.status == HEURISTIC
    opt = solve_exact_dp(inst).ens
    _, e_ub = ens_bounds(net)
    tol = 1e-9 * max(1.0, e_ub)
    assert opt - tol <= heur.ens <= e_ub + tol
    assert heur.n_used <= budget


def test_heuristic_close_on_medium_tree():
    net = random_network(300, np.random.default_rng(5), shape="recursive")
    inst = SapInstance(net, 20)
    opt = solve_exact_dp(inst).ens
    heur = solve_heuristic(inst).ens
    assert opt <= heur <= opt * 1.02


def test_big_m_is_unswitched_iflow(table1):
    m = big_m(table1)
    free = evaluate_iflows(table1, switch=np.zeros(table1.n_nodes, bool))
    np.testing.assert_array_equal(m[1:], free.downstream[1:])


def _lp_sections(text):
    names = {"continuous": set(), "binary": set()}
    section = None
    for line in text.splitlines():
        head = line.strip()
        if head in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
            section = head
            continue
        if section == "Binaries" and head:
            names["binary"].add(head)
        elif section in ("Minimize", "Subject To", "Bounds"):
            names["continuous"] |= set(re.findall(r"\b[fF]_[0-9_]+", head))
    return names


def test_lp_counts(table1):
    text = export_milp(SapInstance(table1, 5))
    names = _lp_sections(text)
    assert len(names["binary"]) == 8
    assert len(names["continuous"]) == 16
    rows = [ln.split(":")[0].strip() for ln in text.splitlines() if re.match(r"^ \w+:", ln)]
    assert sum(r == "card" for r in rows) == 1
    assert sum(r.startswith("bal_") for r in rows) == 8
    assert sum(r.startswith("bigm_") for r in rows) == 8
    assert "<= 5" in next(ln for ln in text.splitlines() if ln.startswith(" card:"))


def test_lp_fixed_and_forbidden(table1):
    text = export_milp(SapInstance(table1, 2, fixed_switches=[(0, 1)], forbidden_arcs=[(1, 5)]))
    assert " x_0_1 = 1" in text
    assert " x_1_5 = 0" in text
    card = next(ln for ln in text.splitlines() if ln.startswith(" card:"))
    assert "x_0_1" not in card


def test_read_solution(table1):
    inst = SapInstance(table1, 2)
    values = read_solution("# solution\nx_1_2 1\nx_2_6 0.9999\nx_4_8 0\nf_1_2 3.5\nobj 1e4\n")
    assert values["f_1_2"] == 3.5
    assert switches_from_solution(inst, values) == ((1, 2), (2, 6))


def _solve_lp(tmp_path, text):
    hs = pytest.importorskip("highspy")
    path = tmp_path / "model.lp"
    path.write_text(text)
    h = hs.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(str(path))
    h.run()
    lp = h.getLp()
    values = dict(zip(lp.col_names_, h.getSolution().col_value))
    return h.getInfo().objective_function_value, values


@pytest.mark.parametrize("n, breaker", [(0, True), (1, False), (3, True), (8, False)])
def test_lp_solves_to_dp_optimum(tmp_path, table1, n, breaker):
    inst = SapInstance.with_breaker(table1, n) if breaker else SapInstance(table1, n)
    obj, values = _solve_lp(tmp_path, export_milp(inst))
    dp = solve_exact_dp(inst)
    assert obj == pytest.approx(dp.ens, rel=1e-6)
    mask = np.zeros(table1.n_nodes, bool)
    mask[[j for _, j in switches_from_solution(inst, values)]] = True
    assert ens(table1, evaluate_iflows(table1, switch=mask)) == pytest.approx(dp.ens, rel=1e-6)
