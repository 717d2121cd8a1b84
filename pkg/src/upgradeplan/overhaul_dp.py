"""Dynamic programs over a fixed overhaul calendar.

Both programs condition on the first overhaul at which an upgrade happens
and recurse on the remaining suffix of the calendar. Suffixes are indexed
by overhaul position, so the table has ``m + 1`` entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .base_solver import _dispatch, solve_base
from .model import INFINITY, Policy, SolveResult, policy_cost, tie_tol

__all__ = ["DpTable", "solve_overhaul_only", "solve_general", "solve"]


@dataclass(frozen=True)
class DpTable:
    """Suffix costs and policies, indexed ``0..m`` by the overhaul the suffix starts at.

    Index 0 is the whole lifetime; index ``l`` starts at the ``l``-th overhaul.
    Policy times are absolute ages.
    """

    suffix_cost: tuple
    suffix_policy: tuple


def _marks(instance):
    return (0.0,) + instance.overhauls + (instance.horizon,)


def _backward(instance, segment):
    """Fill the suffix table.

    ``segment(l, j)`` returns ``(cost, absolute_times, heuristic)`` for the
    stretch from mark ``l`` to mark ``j`` with no overhaul-upgrade inside.
    Candidates for suffix ``l`` are tried in order: no overhaul-upgrade,
    then the first overhaul-upgrade at mark ``j = l+1, l+2, ...``. A later
    candidate replaces the incumbent only when cheaper beyond the tie
    tolerance, or tied with fewer upgrades.
    """
    marks = _marks(instance)
    last = len(marks) - 1
    cost = [0.0] * last
    times = [()] * last
    heuristic = False
    for l in range(last - 1, -1, -1):
        best_c, best_t, best_h = segment(l, last)
        for j in range(l + 1, last):
            c_seg, t_seg, h_seg = segment(l, j)
            c = c_seg + instance.price + cost[j]
            t = t_seg + (marks[j],) + times[j]
            if c < best_c - tie_tol(best_c) or (c <= best_c + tie_tol(best_c) and len(t) < len(best_t)):
                best_c, best_t, best_h = c, t, h_seg
        cost[l], times[l] = best_c, best_t
        heuristic = heuristic or best_h
    return DpTable(tuple(cost), tuple(times)), heuristic


def _result(instance, table, heuristic):
    policy = Policy(table.suffix_policy[0], instance.horizon)
    penalty = instance.penalty if math.isfinite(instance.penalty) else 0.0
    total = policy_cost(instance.model, policy, instance.price, penalty, instance.overhauls)
    return SolveResult(
        policy=policy,
        total_cost=total,
        shape=None,
        heuristic=heuristic,
        off_overhaul=policy.off_overhaul(instance.overhauls),
        extra={"table": table},
    )


def solve_overhaul_only(instance) -> SolveResult:
    """Optimal policy when upgrades may happen only at overhauls.

    The penalty field is ignored. With no overhauls the empty policy is
    returned.
    """
    marks = _marks(instance)
    model = instance.model

    def segment(l, j):
        return float(model.cost(marks[j] - marks[l])), (), False

    table, _ = _backward(instance, segment)
    return _result(instance, table, False)


def solve_general(instance) -> SolveResult:
    """Optimal policy for a finite penalty on upgrades between overhauls.

    Each stretch between consecutive overhaul-upgrades is a base-case
    problem at price ``price + penalty``; its upgrade times are shifted by
    the stretch's start.
    """
    if not math.isfinite(instance.penalty):
        raise ValueError("penalty is infinite; use solve_overhaul_only")
    marks = _marks(instance)
    model = instance.model
    price = instance.price + instance.penalty
    memo = {}

    def segment(l, j):
        start, end = marks[l], marks[j]
        rel = tuple(t - start for t in marks[l + 1 : j])
        key = (end - start, rel)
        if key not in memo:
            memo[key] = _dispatch(model, end - start, price, rel)
        r = memo[key]
        shifted = tuple(start + t for t in r.times)
        return r.total_cost, shifted, r.heuristic

    table, heuristic = _backward(instance, segment)
    return _result(instance, table, heuristic)


def solve(instance) -> SolveResult:
    """Route by penalty: zero to the base case, infinite to overhaul-only, else the general program."""
    if instance.penalty == 0:
        return solve_base(instance)
    if instance.penalty == INFINITY:
        return solve_overhaul_only(instance)
    return solve_general(instance)
