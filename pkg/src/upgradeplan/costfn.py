"""Cycle-cost evaluation, curvature classification and the upgrade-count bound."""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import DomainError, TechnicalRequirementError
from .model import CostModel, Instance, ShapeClass

log = logging.getLogger(__name__)

__all__ = [
    "eval_cycle_cost",
    "eval_cycle_cost_derivative",
    "classify_shape",
    "find_inflection",
    "upper_bound_upgrades",
    "upgrade_bound",
]


def _checked(T, horizon):
    arr = np.asarray(T, dtype=float)
    if np.any(arr < 0) or (horizon is not None and np.any(arr > horizon * (1 + 1e-12))):
        raise DomainError(f"age {T} outside [0, {horizon}]")
    return T


def eval_cycle_cost(model: CostModel, T, horizon=None):
    """Cycle cost ``C(T)`` for a cycle of length ``T``.

    Parameters
    ----------
    model : CostModel
    T : float or ndarray
        Cycle length(s), within ``[0, horizon]``.
    horizon : float, optional
        When given, ages beyond it are rejected.
    """
    return model.cost(_checked(T, horizon))


def eval_cycle_cost_derivative(model: CostModel, T, horizon=None):
    """``C'(T)``; right-hand derivative at kinks, left-hand at the domain end."""
    return model.rate(_checked(T, horizon))


def _rate_samples(model, horizon):
    t = np.linspace(0.0, horizon, model.validation_samples)
    with np.errstate(invalid="ignore"):
        d = np.asarray(model.rate(t), dtype=float)
    ok = np.isfinite(d)
    return t[ok], d[ok]


def _sign_runs(t, d):
    """Collapse the sign pattern of successive ``C'`` increments into runs.

    Returns a list of ``(sign, first_index, last_index)`` with sign ±1; zero
    increments (linear stretches) are absorbed.
    """
    tol = 1e-9 * (1.0 + np.max(np.abs(d)))
    inc = np.diff(d)
    sign = np.where(inc > tol, 1, np.where(inc < -tol, -1, 0))
    runs = []
    for i, s in enumerate(sign):
        if s == 0:
            continue
        if runs and runs[-1][0] == s:
            runs[-1][2] = i
        else:
            runs.append([int(s), i, i])
    return runs


def classify_shape(model: CostModel, horizon: float) -> ShapeClass:
    """Classify ``C`` on ``[0, horizon]`` as convex, concave, S-shaped or general.

    The increments of ``C'`` over ``model.validation_samples`` points decide:
    never decreasing is convex, never increasing is concave, one switch from
    increasing to decreasing is S-shaped. Anything else is general, with the
    alternating convex/concave pieces attached. An S-shaped verdict whose
    inflection fails the tangent check is downgraded to general.
    """
    t, d = _rate_samples(model, horizon)
    runs = _sign_runs(t, d)
    signs = [r[0] for r in runs]
    if -1 not in signs:
        return ShapeClass("convex")
    if 1 not in signs:
        return ShapeClass("concave")
    if signs == [1, -1]:
        try:
            x = find_inflection(model, horizon, _runs=(t, runs))
        except TechnicalRequirementError as exc:
            log.info("S-shape rejected, treating as general: %s", exc)
        else:
            if x >= horizon:
                return ShapeClass("convex")
            return ShapeClass("s_shaped", inflection=x)
    return ShapeClass("general", pieces=_pieces(t, runs, horizon))


def _pieces(t, runs, horizon):
    cuts = [0.0]
    for prev, nxt in zip(runs[:-1], runs[1:]):
        cuts.append(0.5 * (t[prev[2] + 1] + t[nxt[1]]))
    cuts.append(horizon)
    return tuple((cuts[i], cuts[i + 1], r[0] > 0) for i, r in enumerate(runs))


def find_inflection(model: CostModel, horizon: float, *, _runs=None) -> float:
    """Inflection age of an S-shaped (convex, then concave) cycle cost.

    The switch is located by bisection on "``C'`` drops across a short
    centred window around ``t``". When ``C'`` is flat just left of the result
    (a linear stretch between the convex and concave parts) a second
    bisection with a one-sided window moves it to the right end of the
    stretch. The result is
    verified against ``C(x + Δ) - C(x) < C'(x) Δ`` for sampled ``Δ`` up to
    ``horizon - x``.

    Raises
    ------
    TechnicalRequirementError
        When no convex-to-concave switch exists or the check fails.
    """
    if _runs is None:
        t, d = _rate_samples(model, horizon)
        runs = _sign_runs(t, d)
    else:
        t, runs = _runs
    first_down = next((i for i, r in enumerate(runs) if r[0] < 0), None)
    if first_down is None or first_down == 0:
        raise TechnicalRequirementError("no convex-to-concave switch in the cycle cost")
    lo = float(t[runs[first_down - 1][2]])
    hi = float(t[runs[first_down][1] + 1])

    eps = 8 * np.finfo(float).eps
    width = 1e-10 * horizon

    def bisect(lo, hi, left, right):
        # smallest s where C' drops from s - left to s + right
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            a, b = model.rate(np.array([max(mid - left, 0.0), min(mid + right, horizon)]))
            if b < a - eps * (1.0 + abs(a)):
                hi = mid
            else:
                lo = mid
        return hi

    # centred comparison: unbiased at smooth inflections and symmetric kinks
    h = 1e-6 * horizon
    x = bisect(lo, hi, h / 2, h / 2)
    # on a linear stretch the centred test stops up to h short of its end
    a, b = model.rate(np.array([max(x - 2 * h, 0.0), max(x - h, 0.0)]))
    if abs(b - a) <= eps * (1.0 + abs(a)):
        x = bisect(max(x - h, lo), min(x + h, horizon), 0.0, width)
    _check_tangent(model, horizon, x)
    return x


def _check_tangent(model, horizon, x, samples=512):
    span = horizon - x
    if span <= 0:
        return
    deltas = np.unique(np.concatenate([span * np.linspace(0, 1, samples)[1:], span * np.logspace(-8, 0, 64)]))
    cx = model.cost(x)
    slope = model.rate(x)
    rise = model.cost(x + deltas) - cx
    tol = 1e-9 * (1.0 + abs(cx))
    bad = rise > slope * deltas + tol
    if np.any(bad):
        d = float(deltas[np.argmax(bad)])
        raise TechnicalRequirementError(
            f"inflection candidate {x:.6g} fails the tangent check at Δ = {d:.6g}"
        )


def upgrade_bound(model: CostModel, horizon: float, price: float) -> int:
    """``⌊(C(H) + v(0)) / (price - v(0))⌋`` clamped at zero."""
    v0 = model.initial_salvage
    if not price > v0:
        raise DomainError(f"price {price} must exceed v(0) = {v0}")
    ratio = (float(model.cost(horizon)) + v0) / (price - v0)
    if not math.isfinite(ratio):
        raise DomainError("upgrade bound is not finite")
    return max(0, math.floor(ratio + 1e-9 * (1.0 + abs(ratio))))


def upper_bound_upgrades(instance: Instance) -> int:
    """No policy with more upgrades than this can be optimal."""
    return upgrade_bound(instance.model, instance.horizon, instance.price)
