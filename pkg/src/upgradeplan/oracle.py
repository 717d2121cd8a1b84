"""Brute-force grid dynamic program used as an independent reference.

Upgrades are restricted to grid points and every grid policy is searched
exactly. The result is a feasible policy, so its cost never beats the exact
solvers. Nothing here reuses the solvers' search code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import MATCH_TOL, Policy, SolveResult, policy_cost

__all__ = ["GridSpec", "oracle_solve", "MAX_GRID_POINTS"]

MAX_GRID_POINTS = 1_000_000


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution ``step``; ``snap_overhauls`` inserts overhaul times as extra points."""

    step: float
    snap_overhauls: bool = True

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise DomainError(f"grid step must be positive and finite, got {self.step}")

    @classmethod
    def default(cls, horizon):
        return cls(horizon / 1000)

    def points(self, horizon, overhauls=()):
        """Sorted grid on ``[0, horizon]`` and whether it is uniform."""
        ratio = horizon / self.step
        k = round(ratio) if abs(ratio - round(ratio)) < 1e-9 * ratio else math.ceil(ratio)
        k = max(int(k), 1)
        if k + 1 > MAX_GRID_POINTS:
            raise DomainError(f"grid with {k + 1} points exceeds the cap of {MAX_GRID_POINTS}")
        grid = np.linspace(0.0, horizon, k + 1)
        if not self.snap_overhauls or not overhauls:
            return grid, True
        tol = MATCH_TOL * horizon
        extra = [t for t in overhauls if np.min(np.abs(grid - t)) > tol]
        if not extra:
            # overhauls already on the grid: pin them exactly
            idx = [int(np.argmin(np.abs(grid - t))) for t in overhauls]
            grid[idx] = overhauls
            return grid, True
        return np.sort(np.concatenate([grid, extra])), False


def _on_overhaul(points, overhauls, horizon):
    if not overhauls:
        return np.zeros(points.size, dtype=bool)
    marks = np.asarray(overhauls)
    return np.min(np.abs(points[:, None] - marks[None, :]), axis=1) <= MATCH_TOL * horizon


def oracle_solve(instance, grid: GridSpec | None = None) -> SolveResult:
    """Cheapest policy whose upgrades all lie on the grid.

    Parameters
    ----------
    instance : Instance
    grid : GridSpec, optional
        Defaults to ``H/1000`` spacing with overhauls snapped.

    With an infinite penalty the candidate points are the overhaul times.
    """
    H = instance.horizon
    grid = grid or GridSpec.default(H)
    model = instance.model
    pts, uniform = grid.points(H, instance.overhauls)
    on = _on_overhaul(pts, instance.overhauls, H)
    if math.isinf(instance.penalty):
        pts = np.concatenate([[0.0], np.asarray(instance.overhauls, dtype=float), [H]])
        on = np.array([False] + [True] * len(instance.overhauls) + [False])
        uniform = False
        extra_cost = np.zeros(pts.size)
    else:
        extra_cost = np.where(on, 0.0, instance.penalty)
    n = pts.size
    lag_cost = model.cost(pts - pts[0]) if uniform else None

    # best[k]: cheapest schedule on [0, pts[k]] ending with an upgrade at pts[k]
    best = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=int)
    best[0] = 0.0
    for k in range(1, n):
        if uniform:
            seg = lag_cost[k:0:-1]
        else:
            seg = model.cost(pts[k] - pts[:k])
        vals = best[:k] + seg
        j = int(np.argmin(vals))
        parent[k] = j
        best[k] = vals[j] + (instance.price + extra_cost[k] if k < n - 1 else 0.0)

    times = []
    k = parent[n - 1]
    while k > 0:
        times.append(float(pts[k]))
        k = parent[k]
    policy = Policy(tuple(reversed(times)), H)
    penalty = instance.penalty if math.isfinite(instance.penalty) else 0.0
    total = policy_cost(model, policy, instance.price, penalty, instance.overhauls)
    return SolveResult(
        policy=policy,
        total_cost=total,
        shape=None,
        off_overhaul=policy.off_overhaul(instance.overhauls),
        extra={"grid_points": n, "dp_cost": float(best[-1])},
    )
