import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import load, random_instance

from upgradeplan import (
    INFINITY,
    policy_cost,
    solve,
    solve_base,
    solve_general,
    solve_overhaul_only,
)
from upgradeplan.base_solver import _dispatch

A = load("setting_a")
B = load("setting_b")
FIVE_YEARLY = (5.0, 10.0, 15.0, 20.0, 25.0)


@pytest.mark.parametrize(
    "inst, overhauls, times, cost",
    [
        (A, FIVE_YEARLY, (15.0,), 27.308),
        (B, FIVE_YEARLY, FIVE_YEARLY, 38.732),
        (B, (10.0, 20.0), (10.0, 20.0), 42.6101),
    ],
)
def test_overhaul_only(inst, overhauls, times, cost):
    r = solve_overhaul_only(inst.with_(overhauls=overhauls, penalty=INFINITY))
    np.testing.assert_allclose(r.times, times)
    assert r.total_cost == pytest.approx(cost, abs=1e-3)
    assert r.off_overhaul == 0


def test_overhaul_only_without_overhauls():
    r = solve_overhaul_only(B)
    assert r.times == ()
    assert r.total_cost == pytest.approx(B.cost(30.0))


@pytest.mark.parametrize(
    "inst, times, cost, s",
    [
        (A, (10.0, 20.0), 28.027, 0),
        (B, (10.0, 50 / 3, 70 / 3), 41.794, 2),
    ],
)
def test_general_dp(inst, times, cost, s):
    r = solve_general(inst.with_(penalty=1.5, overhauls=(10.0, 20.0)))
    np.testing.assert_allclose(r.times, times)
    assert r.total_cost == pytest.approx(cost, abs=1e-3)
    assert r.off_overhaul == s


@pytest.mark.parametrize("inst", [A, B, load("unequal_final_cycle")], ids=["A", "B", "unequal"])
def test_zero_penalty_matches_base(inst):
    H = inst.horizon
    with_overhauls = inst.with_(penalty=0.0, overhauls=(H / 3, 2 * H / 3))
    assert solve_general(with_overhauls).total_cost == pytest.approx(solve_base(inst).total_cost, rel=1e-9)


def test_routing():
    inst = B.with_(overhauls=(10.0, 20.0))
    assert solve(inst.with_(penalty=0.0)).total_cost == pytest.approx(37.0887, abs=1e-3)
    assert solve(inst.with_(penalty=INFINITY)).total_cost == pytest.approx(42.6101, abs=1e-3)
    assert solve(inst.with_(penalty=1.5)).total_cost == pytest.approx(41.794, abs=1e-3)


def test_general_rejects_infinite_penalty():
    with pytest.raises(ValueError):
        solve_general(B.with_(penalty=INFINITY, overhauls=(10.0,)))


def test_table_is_consistent():
    inst = B.with_(penalty=1.5, overhauls=(10.0, 20.0))
    table = solve_general(inst).extra["table"]
    marks = (0.0, 10.0, 20.0)
    for l, (cost, times) in enumerate(zip(table.suffix_cost, table.suffix_policy)):
        start = marks[l]
        cycles = np.diff((start,) + times + (30.0,))
        s = sum(1 for t in times if min(abs(t - o) for o in inst.overhauls) > 1e-9 * 30)
        recomputed = len(times) * inst.price + s * inst.penalty + float(np.sum(inst.cost(cycles)))
        assert cost == pytest.approx(recomputed, rel=1e-9)


def test_segment_translation():
    # a segment solved on its own length equals the same stretch solved at its absolute offset
    inst = B.with_(penalty=1.5, overhauls=(10.0, 20.0))
    local = _dispatch(inst.model, 20.0, 5.5)
    absolute = solve_general(inst.with_(overhauls=(10.0,), horizon=30.0))
    shifted = tuple(10.0 + t for t in local.times)
    assert absolute.times[1:] == pytest.approx(shifted)


def check_objective(inst, r):
    penalty = inst.penalty if math.isfinite(inst.penalty) else 0.0
    recomputed = policy_cost(inst.model, r.policy, inst.price, penalty, inst.overhauls)
    assert r.total_cost == pytest.approx(recomputed, rel=1e-9, abs=1e-12)
    if math.isinf(inst.penalty):
        assert r.off_overhaul == 0


@settings(max_examples=20)
@given(seed=st.integers(0, 2**32 - 1))
def test_objective_consistency(seed):
    inst = random_instance(np.random.default_rng(seed))
    check_objective(inst, solve(inst))


@settings(max_examples=10)
@given(seed=st.integers(0, 2**32 - 1))
def test_extreme_penalty_agrees_with_overhaul_only(seed):
    inst = random_instance(np.random.default_rng(seed), penalty_kind="finite")
    bound = 10 * (inst.price + abs(inst.cost(inst.horizon)) + 1)
    only = solve_overhaul_only(inst)
    base = solve_base(inst)
    if only.total_cost <= base.total_cost + bound:
        assert solve_general(inst.with_(penalty=bound)).total_cost == pytest.approx(only.total_cost, rel=1e-9)


@settings(max_examples=6)
@given(seed=st.integers(0, 2**32 - 1))
def test_off_overhaul_count_monotone_in_penalty(seed):
    inst = random_instance(np.random.default_rng(seed), penalty_kind="finite")
    s = [solve(inst.with_(penalty=float(cd))).off_overhaul for cd in np.linspace(0.0, 5.0, 8)]
    assert all(b <= a for a, b in zip(s[:-1], s[1:]))
