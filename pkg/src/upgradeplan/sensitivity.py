"""Parameter sweeps with policy-change breakpoints, and the linearization check."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .costfn import eval_cycle_cost, eval_cycle_cost_derivative
from .model import Instance, Policy, SolveResult, policy_cost
from .overhaul_dp import solve

log = logging.getLogger(__name__)

__all__ = [
    "SweepResult",
    "DominanceCheck",
    "sweep_cd",
    "sweep_c0",
    "sweep_overhaul_count",
    "equidistant_overhauls",
    "linearized_dominance_check",
]

BISECT_TOL = 1e-6


@dataclass(frozen=True)
class SweepResult:
    """Solutions along a swept parameter.

    ``samples`` holds ``(value, SolveResult)`` pairs in increasing order of
    value; ``breakpoints`` are the values where the returned policy changes,
    refined by bisection.
    """

    parameter: str
    samples: tuple
    breakpoints: tuple = ()

    @property
    def values(self):
        return np.array([v for v, _ in self.samples])

    @property
    def costs(self):
        return np.array([r.total_cost for _, r in self.samples])

    @property
    def n_upgrades(self):
        return [r.n_upgrades for _, r in self.samples]

    @property
    def off_overhaul(self):
        return [r.off_overhaul for _, r in self.samples]


def _same(a: SolveResult, b: SolveResult):
    return a.policy.same_as(b.policy)


def _bisect(solve_at, lo, hi, r_lo, tol=BISECT_TOL):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _same(solve_at(mid), r_lo):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sweep(name, solve_at, values, refine=True):
    samples = [(float(v), solve_at(float(v))) for v in values]
    breaks = []
    for (a, ra), (b, rb) in zip(samples[:-1], samples[1:]):
        if not _same(ra, rb):
            breaks.append(_bisect(solve_at, a, b, ra) if refine else 0.5 * (a + b))
    return SweepResult(name, tuple(samples), tuple(breaks))


def _grid(lo, hi, points):
    if points < 2:
        raise ValueError("a sweep needs at least 2 points")
    if not hi > lo:
        raise ValueError(f"empty sweep range [{lo}, {hi}]")
    return np.linspace(lo, hi, int(points))


def _check_affine(instance, result, name):
    """Each sampled policy's cost must be affine in the swept parameter."""
    for value, r in result.samples:
        slope = r.off_overhaul if name == "cd" else r.n_upgrades
        at = lambda x: policy_cost(  # noqa: E731
            instance.model,
            r.policy,
            x if name == "c0" else instance.price,
            x if name == "cd" else instance.penalty,
            instance.overhauls,
        )
        step = 1.0
        resid = at(value + step) - at(value) - slope * step
        if abs(resid) > 1e-9 * (1.0 + abs(r.total_cost)):
            log.warning("policy cost not affine in %s at %g (residual %g)", name, value, resid)


def sweep_cd(instance: Instance, range: tuple, points: int, refine=True) -> SweepResult:
    """Solve over evenly spaced penalties in ``range``.

    The number of off-overhaul upgrades should not grow with the penalty; a
    warning is issued if it does.
    """
    lo, hi = map(float, range)
    if lo < 0:
        raise ValueError("penalty range must lie in [0, inf)")
    res = _sweep("cd", lambda x: solve(instance.with_(penalty=x)), _grid(lo, hi, points), refine)
    _check_affine(instance, res, "cd")
    s = res.off_overhaul
    if any(b > a for a, b in zip(s[:-1], s[1:])):
        warnings.warn(f"off-overhaul upgrade count increased along the penalty sweep: {s}", RuntimeWarning)
    return res


def sweep_c0(instance: Instance, range: tuple, points: int, refine=True) -> SweepResult:
    """Solve over evenly spaced upgrade prices in ``range`` (must exceed ``v(0)``).

    The number of upgrades should not grow with the price; a warning is
    issued if it does.
    """
    lo, hi = map(float, range)
    v0 = instance.model.initial_salvage
    if not lo > v0:
        raise ValueError(f"price range must lie above v(0) = {v0}")
    res = _sweep("c0", lambda x: solve(instance.with_(price=x)), _grid(lo, hi, points), refine)
    _check_affine(instance, res, "c0")
    n = res.n_upgrades
    if any(b > a for a, b in zip(n[:-1], n[1:])):
        warnings.warn(f"upgrade count increased along the price sweep: {n}", RuntimeWarning)
    return res


def equidistant_overhauls(horizon, m):
    """``m`` overhauls at ``i·H/(m+1)``."""
    return tuple(horizon * i / (m + 1) for i in range(1, m + 1))


def sweep_overhaul_count(instance: Instance, m_values) -> SweepResult:
    """Solve with ``m`` evenly spaced overhauls for each ``m`` in ``m_values``.

    No monotonicity is expected: more overhauls can cost more.
    """
    ms = sorted(int(m) for m in m_values)
    if ms and ms[0] < 0:
        raise ValueError("overhaul counts must be non-negative")
    return _sweep(
        "m",
        lambda m: solve(instance.with_(overhauls=equidistant_overhauls(instance.horizon, int(m)))),
        ms,
        refine=False,
    )


@dataclass(frozen=True)
class DominanceCheck:
    """Outcome of :func:`linearized_dominance_check`.

    ``applies`` is true when ``policy`` is certified optimal for the
    original instance; ``result`` is the solution of the linearized model.
    """

    applies: bool
    policy: Policy | None
    result: SolveResult
    reason: str = ""


def linearized_dominance_check(instance: Instance, z: float, samples=2048) -> DominanceCheck:
    """Try to certify an optimum using the cost with its tail beyond ``z`` linearized.

    The linearized cost follows the tangent at ``z`` past ``z``. If the
    tangent never exceeds the true cost on ``[z, H]`` and the linearized
    optimum keeps every cycle (remaining lifetime included) at most ``z``
    long, that policy is optimal for the original instance as well.
    """
    H = instance.horizon
    if not 0 < z < H:
        raise ValueError(f"z must lie in (0, {H})")
    model = instance.model
    lin = instance.with_(model=model.linearized(z))
    result = solve(lin)
    t = np.linspace(z, H, samples)
    gap = eval_cycle_cost(model, t) - (eval_cycle_cost(model, z) + (t - z) * eval_cycle_cost_derivative(model, z))
    if np.min(gap) < -1e-9 * (1.0 + float(np.max(np.abs(eval_cycle_cost(model, t))))):
        return DominanceCheck(False, None, result, "tangent at z exceeds the cycle cost beyond z")
    longest = max(result.policy.cycles)
    if longest > z * (1 + 1e-9):
        return DominanceCheck(False, None, result, f"linearized optimum uses a cycle of {longest:.6g} > z")
    return DominanceCheck(True, result.policy, result, "all cycles within z")
