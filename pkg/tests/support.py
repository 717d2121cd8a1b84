"""Shared fixture loading and random instance generation for the tests."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from upgradeplan import CostModel, Instance, load_instance, policy_cost, upper_bound_upgrades
from upgradeplan.functions import Constant, Logistic, Polynomial, Power, Scaled, Sum

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "instances"


def load(name, **changes):
    inst = load_instance(INSTANCE_DIR / f"{name}.json")
    return inst.with_(**changes) if changes else inst


def lipschitz(model, horizon, samples=4001):
    """Sampled bound on ``|C'|`` over ``[0, horizon]``."""
    t = np.linspace(0.0, horizon, samples)
    return float(np.max(np.abs(model.rate(t))))


def _salvage(rng, H):
    v0 = rng.uniform(0.0, 3.0)
    if rng.random() < 0.35:
        return Polynomial((v0, -rng.uniform(0.0, v0 / H)))
    # value drops smoothly around a random age
    drop = rng.uniform(0.5, 1.0) * v0
    return Sum((Constant(v0), Scaled(-1.0, Logistic(drop, rng.uniform(0.5, 4.0), rng.uniform(0.2, 0.8) * H))))


def _gap(rng, H):
    r = rng.random()
    if r < 0.3:
        return _logistic_from_zero(rng, H)
    if r < 0.5:
        return Polynomial((0.0,))
    return Polynomial((0.0, rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.2) / H))


def _logistic_from_zero(rng, H):
    """Increasing logistic shifted so it vanishes at age 0."""
    f = Logistic(rng.uniform(0.2, 2.0), rng.uniform(0.5, 3.0), rng.uniform(0.2, 0.8) * H)
    return Sum((f, Constant(-f(0.0))))


def _rate(rng, H):
    r = rng.random()
    if r < 0.2:
        return Constant(rng.uniform(0.0, 0.05))
    if r < 0.5:
        return Power(rng.uniform(0.01, 0.5), rng.uniform(0.0, 2.0))
    if r < 0.7:
        return Logistic(rng.uniform(0.1, 2.0), rng.uniform(0.5, 3.0), rng.uniform(0.2, 0.8) * H)
    return Polynomial((rng.uniform(0.0, 0.3), rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.01)))


def random_model(rng, H):
    """A components-form cost model that satisfies the monotonicity assumptions."""
    return CostModel.components(
        salvage=_salvage(rng, H),
        gap=_gap(rng, H),
        repair_cost=Polynomial((rng.uniform(0.1, 1.0), rng.uniform(0.0, 0.2))),
        failure_rate=_rate(rng, H),
    )


def random_instance(rng, penalty_kind=None, max_overhauls=3, grid_cells=20):
    """Random valid instance; overhauls sit on multiples of ``H/grid_cells``."""
    H = float(rng.uniform(4.0, 30.0))
    model = random_model(rng, H)
    v0 = model.initial_salvage
    price = v0 + float(rng.uniform(0.2, 6.0))
    m = int(rng.integers(0, max_overhauls + 1))
    idx = sorted(rng.choice(np.arange(1, grid_cells), size=m, replace=False)) if m else []
    overhauls = tuple(H * i / grid_cells for i in idx)
    kind = penalty_kind or rng.choice(["zero", "finite", "infinite"])
    penalty = {"zero": 0.0, "finite": float(rng.uniform(0.1, 3.0)), "infinite": math.inf}[kind]
    return Instance(H, price, penalty, overhauls, model)


def stationarity_residual(model, cycles):
    rates = model.rate(np.array(cycles))
    return float(np.max(np.abs(rates - rates[-1])) / (1 + abs(rates[-1])))


def check_structure(inst, r):
    """Assert the structural properties every base-solver optimum must have."""
    model, H = inst.model, inst.horizon
    # objective consistency
    recomputed = policy_cost(model, r.policy, inst.price)
    assert math.isclose(r.total_cost, recomputed, rel_tol=1e-9, abs_tol=1e-12)
    assert r.n_upgrades <= upper_bound_upgrades(inst)
    if r.n_upgrades >= 1 and not r.heuristic:
        kinks = set()
        for f in model.functions().values():
            kinks.update(f.breakpoints())
        if not any(abs(T - k) < 1e-6 for T in r.policy.cycles for k in kinks):
            assert stationarity_residual(model, r.policy.cycles) <= 1e-6
    if r.shape.kind == "s_shaped" and r.n_upgrades >= 1:
        cycles = r.policy.cycles
        x = r.shape.inflection
        assert np.ptp(cycles[:-1]) <= 1e-8 * H
        assert abs(cycles[-1] - cycles[0]) <= 1e-8 * H or cycles[0] <= x + 1e-8 * H < cycles[-1] + 2e-8 * H
