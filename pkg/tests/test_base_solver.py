import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import check_structure, load, random_instance

from upgradeplan import (
    CostModel,
    Instance,
    classify_shape,
    equidistant_cost,
    oracle_solve,
    solve_base,
    solve_concave,
    solve_convex,
    solve_general_numeric,
    solve_s_shaped,
    tail_cost,
    upper_bound_upgrades,
)
from upgradeplan.functions import Constant, Polynomial, Power, Sum
from upgradeplan.oracle import GridSpec

A = load("setting_a")
B = load("setting_b")
UNEQUAL = load("unequal_final_cycle")
LOGISTIC = load("logistic")

EVENLY_SPACED_COSTS = {
    "A": [32.9653, 27.3081, 28.0268, 30.3572, 33.3387, 36.6489],
    "B": [201.7153, 64.8081, 42.6101, 37.3884, 37.0887, 38.7322],
}


@pytest.mark.parametrize("name, inst", [("A", A), ("B", B)])
@pytest.mark.parametrize("n", range(6))
def test_equidistant_cost_table(name, inst, n):
    assert equidistant_cost(inst, 4.0, n) == pytest.approx(EVENLY_SPACED_COSTS[name][n], abs=1e-3)


def test_equidistant_cost_zero_upgrades_is_full_cycle():
    assert equidistant_cost(UNEQUAL, 0.75, 0) == pytest.approx(UNEQUAL.cost(10.0))


def test_equidistant_cost_short_horizon():
    assert equidistant_cost(load("short_horizon_b"), 0.02, 2) == pytest.approx(0.1761, abs=1e-3)


@pytest.mark.parametrize("t, value", [(5.1, 0.63), (5.0, 0.78)])
def test_tail_cost_examples(t, value):
    assert tail_cost(UNEQUAL, 0.75, 1, t) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_tail_cost_reduces_to_equidistant(n):
    assert tail_cost(B, 4.0, n, 30 / (n + 1)) == pytest.approx(equidistant_cost(B, 4.0, n), rel=1e-12)


@pytest.mark.parametrize(
    "inst, price, times, cost",
    [
        (A, 4.0, (15.0,), 27.3081),
        (B, 4.0, (6.0, 12.0, 18.0, 24.0), 37.0887),
        (A, 100.0, (), 32.9653),
    ],
)
def test_solve_convex(inst, price, times, cost):
    r = solve_convex(inst, price=price)
    np.testing.assert_allclose(r.times, times)
    assert r.total_cost == pytest.approx(cost, abs=1e-3)


def test_solve_concave_examples():
    flat = Instance(10.0, 1.0, 0.0, (), CostModel.direct(Constant(-0.15)))
    r = solve_concave(flat)
    assert r.times == () and r.total_cost == pytest.approx(-0.15)
    root = Instance(10.0, 0.5, 0.0, (), CostModel.direct(Sum((Power(1.0, 0.5, origin=-1.0), Constant(-1.0)))))
    r = solve_base(root)
    assert r.shape.kind == "concave"
    assert r.times == () and r.total_cost == pytest.approx(math.sqrt(11) - 1)


def test_convex_salvage_constant_running_cost_never_upgrades():
    # convex decreasing salvage with constant gap plus repair rate gives a concave cycle cost
    m = CostModel.components(Polynomial((5.0, -0.8, 0.03)), Polynomial((0.0,)), Constant(1.0), Constant(0.4))
    inst = Instance(10.0, 6.0, 0.0, (), m)
    r = solve_base(inst)
    assert r.shape.kind == "concave"
    assert r.times == ()


def test_solve_s_shaped_unequal_final_cycle():
    r = solve_s_shaped(UNEQUAL)
    assert r.n_upgrades == 1
    assert r.times[0] == pytest.approx(4.9, abs=1e-8)
    assert r.total_cost == pytest.approx(0.63, abs=1e-9)
    costs = sorted(c.cost for c in r.candidates)
    assert costs[0] == pytest.approx(0.63, abs=1e-9)
    assert any(c.cost == pytest.approx(0.765) for c in r.candidates)


def test_logistic_example_prefers_many_short_cycles():
    # With c0 = 1 the evenly spaced schedule with 29 upgrades beats never upgrading:
    # 29 + 30 C(1) is about -0.9963 while C(30) is about -2e-9.
    r = solve_base(LOGISTIC)
    assert r.shape.kind == "s_shaped"
    assert r.n_upgrades == 29
    assert r.total_cost == pytest.approx(29 + 30 * LOGISTIC.cost(1.0), abs=1e-12)
    assert r.total_cost < LOGISTIC.cost(30.0)
    o = oracle_solve(LOGISTIC, GridSpec(30 / 3000))
    assert r.total_cost <= o.total_cost + 1e-9


def test_logistic_example_expensive_upgrades_never_pay():
    # once c0 - 2 v(0) >= C(H) no upgrade can pay for itself
    inst = LOGISTIC.with_(price=LOGISTIC.cost(30.0) + 2 * LOGISTIC.model.initial_salvage + 0.01)
    assert solve_base(inst).times == ()


def test_s_shaped_bound_price_gives_empty_policy():
    inst = UNEQUAL.with_(price=UNEQUAL.cost(10.0) + 2 * 0.15)
    assert solve_base(inst).times == ()


@pytest.mark.parametrize(
    "inst, times, cost, tol",
    [
        (A, (15.0,), 27.3081, 1e-3),
        (UNEQUAL, (4.9,), 0.63, 1e-6),
    ],
)
def test_general_numeric_matches_exact(inst, times, cost, tol):
    r = solve_general_numeric(inst)
    assert r.heuristic
    np.testing.assert_allclose(r.times, times, atol=1e-6)
    assert r.total_cost == pytest.approx(cost, abs=tol)


def test_general_numeric_concave():
    flat = Instance(10.0, 1.0, 0.0, (), CostModel.direct(Sum((Power(1.0, 0.5, origin=-1.0), Constant(-1.0)))))
    assert solve_general_numeric(flat).times == ()


def test_modified_price_segment():
    r = solve_base(B, price=5.5, horizon=20.0)
    np.testing.assert_allclose(r.times, (20 / 3, 40 / 3))
    assert r.total_cost == pytest.approx(26.2574, abs=1e-3)
    o = oracle_solve(B.with_(horizon=20.0, price=5.5, overhauls=()), GridSpec(20 / 2000))
    assert r.total_cost <= o.total_cost + 1e-9


def test_solve_base_setting_b():
    assert solve_base(B).total_cost == pytest.approx(37.0887, abs=1e-3)


def test_candidates_never_beat_result():
    for inst in (A, B, UNEQUAL, LOGISTIC):
        r = solve_base(inst)
        assert all(c.cost >= r.total_cost - 1e-9 * (1 + abs(r.total_cost)) for c in r.candidates)


@pytest.mark.parametrize("inst", [A, B, UNEQUAL, LOGISTIC], ids=["A", "B", "unequal", "logistic"])
def test_structure_on_fixtures(inst):
    check_structure(inst, solve_base(inst))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_structure_on_random_instances(seed):
    inst = random_instance(np.random.default_rng(seed), penalty_kind="zero", max_overhauls=0)
    r = solve_base(inst)
    check_structure(inst, r)
    o = oracle_solve(inst, GridSpec(inst.horizon / 500))
    assert r.total_cost <= o.total_cost + 1e-9


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.01, 1.0), b=st.floats(0.001, 0.5), horizon=st.floats(2.0, 40.0), price=st.floats(0.1, 10.0))
def test_equidistant_cost_convex_in_n(a, b, horizon, price):
    inst = Instance(horizon, price, 0.0, (), CostModel.direct(Polynomial((0.0, a, b))))
    assert classify_shape(inst.model, horizon).kind == "convex"
    top = max(upper_bound_upgrades(inst), 2)
    c = np.array([equidistant_cost(inst, price, n) for n in range(top + 2)])
    assert np.all(np.diff(c, 2) >= -1e-9 * (1 + np.abs(c[1:-1])))


def test_solvers_are_deterministic():
    assert solve_general_numeric(UNEQUAL) == solve_general_numeric(UNEQUAL)
