"""Core data types: cost model, instance, policy and solver results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import DomainError, InstanceError
from .functions import Function, integrate_product

INFINITY = math.inf
"""Distinguished penalty value: upgrades are allowed only at overhauls."""

MATCH_TOL = 1e-9  # overhaul matching tolerance, relative to the horizon


@dataclass(frozen=True)
class CostModel:
    """Cycle cost ``C(T)`` of keeping one system version for ``T`` time units.

    Either give the four components (salvage value ``v``, functionality gap
    ``c_f``, repair cost per failure ``k`` and failure rate ``h``), in which
    case ``C(T) = -v(T) + ∫_0^T c_f + ∫_0^T k·h``, or give ``cycle`` directly.
    Use :meth:`components` and :meth:`direct` rather than the constructor.

    ``linearize_after`` replaces ``C`` beyond that age by its tangent line.
    """

    cycle: Function | None = None
    salvage: Function | None = None
    gap: Function | None = None
    repair_cost: Function | None = None
    failure_rate: Function | None = None
    validation_samples: int = 2048
    linearize_after: float | None = None

    def __post_init__(self):
        parts = (self.salvage, self.gap, self.repair_cost, self.failure_rate)
        if self.cycle is None:
            if any(p is None for p in parts):
                raise DomainError("components form needs salvage, gap, repair_cost and failure_rate")
        elif any(p is not None for p in parts):
            raise DomainError("give either a direct cycle cost or the four components, not both")
        if self.validation_samples < 3:
            raise DomainError("validation_samples must be at least 3")

    @classmethod
    def components(cls, salvage, gap, repair_cost, failure_rate, validation_samples=2048):
        return cls(
            salvage=salvage,
            gap=gap,
            repair_cost=repair_cost,
            failure_rate=failure_rate,
            validation_samples=validation_samples,
        )

    @classmethod
    def direct(cls, cycle, validation_samples=2048):
        return cls(cycle=cycle, validation_samples=validation_samples)

    @property
    def is_direct(self):
        return self.cycle is not None

    def linearized(self, z):
        """Same model with ``C(t) = C(z) + (t - z) C'(z)`` for ``t >= z``."""
        return replace(self, linearize_after=float(z))

    @cached_property
    def _tangent(self):
        z = np.array(self.linearize_after)
        return float(self._raw_cost(z)), float(self._raw_rate(z))

    def _raw_cost(self, t):
        if self.is_direct:
            return self.cycle._value(t)
        return (
            -self.salvage._value(t)
            + self.gap._primitive(t)
            + integrate_product(self.repair_cost, self.failure_rate, t)
        )

    def _raw_rate(self, t):
        if self.is_direct:
            return self.cycle._derivative(t)
        return (
            -self.salvage._derivative(t)
            + self.gap._value(t)
            + self.repair_cost._value(t) * self.failure_rate._value(t)
        )

    def cost(self, t):
        """Cycle cost ``C(t)``; accepts floats or arrays."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError("cycle length must be non-negative")
        z = self.linearize_after
        if z is None:
            out = self._raw_cost(arr)
        else:
            c_z, r_z = self._tangent
            below = np.minimum(arr, z)
            out = np.where(arr > z, c_z + (arr - z) * r_z, self._raw_cost(below))
        return float(out) if np.ndim(t) == 0 else out

    def rate(self, t):
        """``C'(t)``: right-hand derivative at kinks, left-hand at the end of a domain."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError("cycle length must be non-negative")
        z = self.linearize_after
        if z is None:
            out = self._raw_rate(arr)
        else:
            out = np.where(arr >= z, self._tangent[1], self._raw_rate(np.minimum(arr, z)))
        return float(out) if np.ndim(t) == 0 else out

    @cached_property
    def initial_salvage(self):
        """``v(0)``; in direct form the model's ``-C(0)``."""
        if self.is_direct:
            return -float(self.cost(0.0))
        return float(self.salvage(0.0))

    def functions(self):
        if self.is_direct:
            return {"cycle": self.cycle}
        return {
            "salvage": self.salvage,
            "gap": self.gap,
            "repair_cost": self.repair_cost,
            "failure_rate": self.failure_rate,
        }

    def validate(self, horizon):
        """Check domain coverage, finiteness and the monotonicity assumptions on ``[0, horizon]``.

        Raises
        ------
        InstanceError
            Naming the offending component.
        """
        for name, f in self.functions().items():
            lo, hi = f.domain
            if lo > 0.0 or hi < horizon:
                raise InstanceError(f"cost_model.{name}", f"defined on [{lo}, {hi}], must cover [0, {horizon}]")
        grid = np.linspace(0.0, horizon, self.validation_samples)
        try:
            values = {name: f(grid) for name, f in self.functions().items()}
            costs = self.cost(grid)
        except DomainError as exc:
            raise InstanceError("cost_model", str(exc)) from None
        if not np.all(np.isfinite(costs)):
            raise InstanceError("cost_model", "cycle cost is not finite on [0, horizon]")
        if self.is_direct:
            return
        for name, vals in values.items():
            if not np.all(np.isfinite(vals)):
                raise InstanceError(f"cost_model.{name}", "not finite on [0, horizon]")
        tol = lambda x: 1e-9 * (1.0 + np.abs(x[:-1]))  # noqa: E731
        if abs(values["gap"][0]) > 1e-12:
            raise InstanceError("cost_model.gap", "functionality gap must vanish at age 0")
        for name in ("gap", "repair_cost", "failure_rate"):
            v = values[name]
            if np.any(np.diff(v) < -tol(v)):
                raise InstanceError(f"cost_model.{name}", "must be non-decreasing on [0, horizon]")
        v = values["salvage"]
        if np.any(np.diff(v) > tol(v)):
            raise InstanceError("cost_model.salvage", "salvage value must be non-increasing on [0, horizon]")


@dataclass(frozen=True)
class Instance:
    """Lifetime ``horizon``, upgrade ``price`` c0, off-overhaul ``penalty`` cd,
    sorted interior ``overhauls`` and the cycle cost model.

    ``penalty`` may be :data:`INFINITY`, meaning upgrades happen only at
    overhauls.
    """

    horizon: float
    price: float
    penalty: float
    overhauls: tuple
    model: CostModel

    def __post_init__(self):
        object.__setattr__(self, "overhauls", tuple(float(x) for x in self.overhauls))
        H = self.horizon
        if not (np.isfinite(H) and H > 0):
            raise InstanceError("horizon", f"must be a positive finite number, got {H}")
        if not (self.penalty >= 0):
            raise InstanceError("penalty", f"must be >= 0 or infinity, got {self.penalty}")
        prev = 0.0
        for i, t in enumerate(self.overhauls):
            if not (prev < t < H):
                raise InstanceError(
                    f"overhauls[{i}]",
                    f"overhaul times must be strictly increasing inside (0, {H}), got {t}",
                )
            prev = t
        self.model.validate(H)
        v0 = self.model.initial_salvage
        if not (self.price > v0):
            raise InstanceError(
                "price", f"upgrade price c0 = {self.price} must exceed the initial salvage value v(0) = {v0}"
            )

    @property
    def gaps(self):
        """Times between consecutive overhauls, ending with the stretch to the horizon."""
        marks = (0.0,) + self.overhauls + (self.horizon,)
        return tuple(b - a for a, b in zip(marks[:-1], marks[1:]))

    def with_(self, **changes):
        return replace(self, **changes)

    def cost(self, t):
        return self.model.cost(self._check_age(t))

    def rate(self, t):
        return self.model.rate(self._check_age(t))

    def _check_age(self, t):
        arr = np.asarray(t, dtype=float)
        slack = 1e-12 * self.horizon
        if np.any(arr < -slack) or np.any(arr > self.horizon + slack):
            raise DomainError(f"age outside [0, {self.horizon}]")
        return np.clip(arr, 0.0, self.horizon) if np.ndim(t) else float(np.clip(arr, 0.0, self.horizon))


def count_off_overhaul(times, overhauls, horizon):
    """Number of upgrade times that do not coincide with an overhaul."""
    tol = MATCH_TOL * horizon
    marks = np.asarray(overhauls, dtype=float)
    count = 0
    for t in times:
        if marks.size == 0 or np.min(np.abs(marks - t)) > tol:
            count += 1
    return count


@dataclass(frozen=True)
class Policy:
    """Upgrade times (ages of the asset) on a horizon.

    ``cycles`` are the inter-upgrade times ``T_1..T_{N+1}``; the last entry
    is the remaining lifetime after the final upgrade.
    """

    times: tuple
    horizon: float

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        for a, b in zip((0.0,) + times, times + (self.horizon,)):
            if not b > a:
                raise DomainError(f"upgrade times must be strictly increasing inside (0, {self.horizon}): {times}")
        object.__setattr__(self, "times", times)

    @property
    def n_upgrades(self):
        return len(self.times)

    @property
    def cycles(self):
        marks = (0.0,) + self.times
        return tuple(b - a for a, b in zip(marks, self.times)) + (self.horizon - marks[-1],)

    def off_overhaul(self, overhauls):
        return count_off_overhaul(self.times, overhauls, self.horizon)

    def shifted(self, offset, horizon):
        return Policy(tuple(t + offset for t in self.times), horizon)

    def same_as(self, other, tol=1e-7):
        if len(self.times) != len(other.times):
            return False
        scale = tol * max(self.horizon, other.horizon)
        return all(abs(a - b) <= scale for a, b in zip(self.times, other.times))


def policy_cost(model, policy, price, penalty=0.0, overhauls=()):
    """``S·penalty + N·price + Σ C(T_i)`` recomputed from scratch."""
    total = policy.n_upgrades * price + float(np.sum(model.cost(np.array(policy.cycles))))
    s = policy.off_overhaul(overhauls) if overhauls is not None else policy.n_upgrades
    if s:
        total += s * penalty
    return total


@dataclass(frozen=True)
class ShapeClass:
    """Curvature class of the cycle cost on ``[0, horizon]``.

    ``kind`` is one of ``"convex"``, ``"concave"``, ``"s_shaped"`` or
    ``"general"``. ``inflection`` is set for S-shaped costs; ``pieces`` lists
    ``(lo, hi, is_convex)`` alternation intervals for general costs.
    """

    kind: str
    inflection: float | None = None
    pieces: tuple = ()

    def __str__(self):
        if self.kind == "s_shaped":
            return f"SShaped, x = {self.inflection:.6g}"
        if self.kind == "general":
            return f"General ({len(self.pieces)} pieces)"
        return self.kind.capitalize()


@dataclass(frozen=True)
class Candidate:
    n_upgrades: int
    times: tuple
    cost: float


@dataclass(frozen=True)
class SolveResult:
    """Optimal policy, its total cost, the shape class used and the candidate trace."""

    policy: Policy
    total_cost: float
    shape: ShapeClass | None
    candidates: tuple = ()
    heuristic: bool = False
    off_overhaul: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def n_upgrades(self):
        return self.policy.n_upgrades

    @property
    def times(self):
        return self.policy.times


def tie_tol(cost):
    return 1e-9 * (1.0 + abs(cost))


def better(cost, n, s, times, best_cost, best_n, best_s, best_times):
    """Deterministic preference: lower cost, then fewer upgrades, then fewer
    off-overhaul upgrades, then lexicographically earlier times."""
    if best_cost is None:
        return True
    if cost < best_cost - tie_tol(best_cost):
        return True
    if cost > best_cost + tie_tol(best_cost):
        return False
    return (n, s, tuple(times)) < (best_n, best_s, tuple(best_times))
