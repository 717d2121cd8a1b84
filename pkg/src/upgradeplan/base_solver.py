"""Base-case solvers: no penalty for upgrading between overhauls.

Each solver minimizes ``N·price + Σ C(T_i)`` over upgrade counts ``N`` and
cycle lengths summing to the horizon. ``price`` is the plain upgrade price,
or the price plus the off-overhaul penalty when a solver is used for the
stretches between overhaul upgrades.

The public functions take an :class:`Instance`; ``horizon`` may be shortened
to solve a prefix of the lifetime with the same cost model.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .costfn import classify_shape, upgrade_bound
from .model import Candidate, Policy, ShapeClass, SolveResult, better, policy_cost, tie_tol
from .search import grid_golden_min

log = logging.getLogger(__name__)

__all__ = [
    "equidistant_cost",
    "tail_cost",
    "solve_convex",
    "solve_concave",
    "solve_s_shaped",
    "solve_general_numeric",
    "solve_base",
]

TAIL_GRID = 1024
GENERAL_STARTS = 32


def _horizon(instance, horizon):
    return instance.horizon if horizon is None else float(horizon)


def _price(instance, price):
    return instance.price if price is None else float(price)


def _equidistant(model, H, price, N):
    return N * price + (N + 1) * float(model.cost(H / (N + 1)))


def _tail(model, H, price, N, t):
    t = np.asarray(t, dtype=float)
    return N * price + N * model.cost((H - t) / N) + model.cost(t)


def equidistant_cost(instance, price, N, horizon=None):
    """Cost of ``N`` upgrades spaced evenly: ``N·price + (N+1)·C(H/(N+1))``."""
    return _equidistant(instance.model, _horizon(instance, horizon), float(price), int(N))


def tail_cost(instance, price, N, t, horizon=None):
    """``N`` evenly spaced upgrades followed by a final cycle of length ``t``."""
    out = _tail(instance.model, _horizon(instance, horizon), float(price), int(N), t)
    return float(out) if np.ndim(t) == 0 else out


class _Best:
    """Running minimum under the package tie-breaking rule."""

    def __init__(self, overhauls):
        self.overhauls = overhauls
        self.cost = None
        self.times = ()
        self.s = 0
        self.trace = []

    def offer(self, times, cost, H):
        times = tuple(float(t) for t in times)
        s = Policy(times, H).off_overhaul(self.overhauls) if self.overhauls else len(times)
        self.trace.append(Candidate(len(times), times, float(cost)))
        if better(cost, len(times), s, times, self.cost, len(self.times), self.s, self.times):
            self.cost, self.times, self.s = float(cost), times, s

    def result(self, model, H, price, shape, heuristic=False):
        policy = Policy(self.times, H)
        total = policy_cost(model, policy, price)
        return SolveResult(
            policy=policy,
            total_cost=total,
            shape=shape,
            candidates=tuple(self.trace),
            heuristic=heuristic,
            off_overhaul=policy.off_overhaul(self.overhauls),
        )


def _even_times(H, N):
    return [H * i / (N + 1) for i in range(1, N + 1)]


def _convex(model, H, price, overhauls=(), shape=None):
    bound = upgrade_bound(model, H, price)
    best = _Best(overhauls)
    N = 0
    current = _equidistant(model, H, price, 0)
    best.offer((), current, H)
    while N < bound:
        nxt = _equidistant(model, H, price, N + 1)
        best.trace.append(Candidate(N + 1, tuple(_even_times(H, N + 1)), nxt))
        if not nxt < current - tie_tol(current):
            break
        N, current = N + 1, nxt
    if N:
        best.offer(_even_times(H, N), current, H)
    return best.result(model, H, price, shape or ShapeClass("convex"))


def _concave(model, H, price, overhauls=(), shape=None):
    best = _Best(overhauls)
    best.offer((), float(model.cost(H)), H)
    return best.result(model, H, price, shape or ShapeClass("concave"))


def _cost_floor(model, H):
    """Lower bound on ``C`` over ``[0, H]``, used to stop hopeless ``N`` early."""
    if not model.is_direct:
        return float(model.cost(0.0))
    grid = np.linspace(0.0, H, model.validation_samples)
    return float(min(model.cost(0.0), np.min(model.cost(grid))))


def _s_shaped(model, H, price, x, overhauls=(), shape=None):
    bound = upgrade_bound(model, H, price)
    best = _Best(overhauls)

    # even spacing only pays off with cycles no longer than the inflection
    N = max(math.ceil(H / x - 1 - 1e-9), 0)
    if N <= bound:
        current = _equidistant(model, H, price, N)
        while N < bound:
            nxt = _equidistant(model, H, price, N + 1)
            if not nxt < current - tie_tol(current):
                break
            N, current = N + 1, nxt
        best.offer(_even_times(H, N), current, H)

    best.offer((), float(model.cost(H)), H)

    floor = _cost_floor(model, H)
    for N in range(1, bound + 1):
        if N * price + (N + 1) * floor > best.cost + tie_tol(best.cost):
            if price + floor > 0:
                break
            continue
        lo = max(H / (N + 1), x)
        t_star, c_star = grid_golden_min(
            lambda t, N=N: _tail(model, H, price, N, t), lo, H, points=TAIL_GRID, tol=1e-10 * H
        )
        if x < t_star < H * (1 - 1e-12):
            step = (H - t_star) / N
            best.offer([step * i for i in range(1, N + 1)], c_star, H)
    return best.result(model, H, price, shape or ShapeClass("s_shaped", inflection=x))


def _project_simplex(V, total):
    """Euclidean projection of each row onto ``{x >= 0, Σx = total}``."""
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - total
    k = np.arange(1, V.shape[1] + 1)
    cond = U - css / k > 0
    rho = V.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(V.shape[0]), rho] / (rho + 1)
    return np.maximum(V - theta[:, None], 0.0)


def _batch_descent(model, X, total, iters=400):
    """Projected gradient descent with per-row step adaptation."""
    F = model.cost(X).sum(axis=1)
    step = np.full(X.shape[0], total / X.shape[1])
    active = np.ones(X.shape[0], dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        G = model.rate(X)
        G = np.where(np.isfinite(G), G, 1e12)
        Y = _project_simplex(X - step[:, None] * G, total)
        FY = model.cost(Y).sum(axis=1)
        gain = F - FY
        ok = active & (gain > 0)
        X = np.where(ok[:, None], Y, X)
        F = np.where(ok, FY, F)
        step = np.where(ok, step * 1.5, step * 0.5)
        stalled = (ok & (gain < 1e-12 * (1 + np.abs(F)))) | (step < 1e-14 * total)
        active &= ~stalled
    return X, F


def _zoom_min(g, lo, hi, width, points=33):
    """Minimize the vectorized ``g`` on ``[lo, hi]`` by repeated grid zooming."""
    best_x, best_y = lo, math.inf
    while True:
        grid = np.linspace(lo, hi, points)
        vals = g(grid)
        i = int(np.argmin(vals))
        if vals[i] < best_y:
            best_x, best_y = float(grid[i]), float(vals[i])
        if hi - lo <= width:
            return best_x, best_y
        span = (hi - lo) / (points - 1)
        lo, hi = max(lo, grid[i] - span), min(hi, grid[i] + span)


def _value_pairs(x, tol):
    """One index pair per distinct pair of cycle lengths (equal lengths included when repeated)."""
    reps = {}
    for i in np.argsort(x, kind="stable"):
        key = next((k for k in reps if abs(k - x[i]) <= tol), None)
        reps.setdefault(x[i] if key is None else key, []).append(int(i))
    groups = list(reps.values())
    pairs = []
    for a, ga in enumerate(groups):
        if len(ga) >= 2:
            pairs.append((ga[0], ga[1]))
        pairs.extend((ga[0], gb[0]) for gb in groups[a + 1 :])
    return pairs


def _polish(model, x, total, sweeps=6):
    """Pairwise exchange moves until no pair improves.

    Cycles of equal length are interchangeable, so only one pair per
    distinct pair of lengths is tried.
    """
    x = x.copy()
    width = 1e-10 * total
    for _ in range(sweeps):
        before = float(model.cost(x).sum())
        for i, j in _value_pairs(x, 1e-9 * total):
            w = x[i] + x[j]
            if w <= 0:
                continue
            s, _ = _zoom_min(lambda s, w=w: model.cost(s) + model.cost(w - s), 0.0, w, width)
            trial = x.copy()
            trial[i], trial[j] = s, w - s
            if model.cost(trial).sum() < model.cost(x).sum():
                x = trial
        x = _collapse(model, x)
        after = float(model.cost(x).sum())
        if before - after <= 1e-12 * (1 + abs(after)):
            break
    return x


def _collapse(model, x):
    """Average coordinates whose marginal costs agree, when that does not hurt.

    Cycles with matching ``C'`` inside one convex stretch can share their
    length at no loss, which turns near-equal clusters into exact ties.
    """
    rates = model.rate(x)
    order = np.argsort(rates)
    groups, cur = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if abs(rates[b] - rates[a]) <= 1e-6 * (1 + abs(rates[a])):
            cur.append(b)
        else:
            groups.append(cur)
            cur = [b]
    groups.append(cur)
    base = float(model.cost(x).sum())
    for g in groups:
        if len(g) < 2:
            continue
        trial = x.copy()
        trial[g] = x[g].mean()
        val = float(model.cost(trial).sum())
        if val <= base + tie_tol(base):
            x, base = trial, val
    return x


def _min_simplex(model, total, n, rng, starts=GENERAL_STARTS):
    X = np.empty((starts, n))
    X[0] = total / n
    X[1:] = rng.dirichlet(np.ones(n), size=starts - 1) * total
    X, F = _batch_descent(model, X, total)
    order = np.argsort(F)
    best_x, best_f = None, math.inf
    for r in order[: min(3, starts)]:
        x = _polish(model, X[r], total)
        f = float(model.cost(x).sum())
        if f < best_f:
            best_x, best_f = x, f
    return np.sort(best_x), best_f


def _envelope_bound(model, H, price, counts):
    """Lower bound on the cost of any policy with ``N`` upgrades, for each ``N`` in ``counts``.

    Uses Jensen's inequality on the lower convex hull of sampled ``C``,
    shifted down to absorb sampling error.
    """
    t = np.linspace(0.0, H, model.validation_samples)
    c = model.cost(t)
    hull = [0]
    for i in range(1, t.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (c[b] - c[a]) * (t[i] - t[a]) >= (c[i] - c[a]) * (t[b] - t[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    margin = float(np.max(np.abs(model.rate(t)))) * (t[1] - t[0])
    counts = np.asarray(counts, dtype=float)
    env = np.interp(H / (counts + 1), t[hull], c[hull]) - margin
    return counts * price + (counts + 1) * env


def _general(model, H, price, overhauls=(), shape=None, seed=0):
    bound = upgrade_bound(model, H, price)
    best = _Best(overhauls)
    best.offer((), float(model.cost(H)), H)
    if bound == 0:
        return best.result(model, H, price, shape or ShapeClass("general"), heuristic=True)
    counts = np.arange(1, bound + 1)
    even = counts * price + (counts + 1) * model.cost(H / (counts + 1))
    i = int(np.argmin(even))
    best.offer(_even_times(H, int(counts[i])), float(even[i]), H)
    lower = _envelope_bound(model, H, price, counts)
    # most promising counts first, so the incumbent tightens early
    for k in np.argsort(lower, kind="stable"):
        N = int(counts[k])
        if lower[k] > best.cost + tie_tol(best.cost):
            break
        rng = np.random.default_rng([seed, N])
        cycles, value = _min_simplex(model, H, N + 1, rng)
        if np.min(cycles) <= 1e-9 * H:
            continue  # degenerate: same cost as fewer upgrades plus a wasted one
        times = np.cumsum(cycles[:-1])
        if times[-1] >= H:
            continue
        best.offer(times, N * price + value, H)
    return best.result(model, H, price, shape or ShapeClass("general"), heuristic=True)


def _dispatch(model, H, price, overhauls=()):
    shape = classify_shape(model, H)
    if shape.kind == "convex":
        return _convex(model, H, price, overhauls, shape)
    if shape.kind == "concave":
        return _concave(model, H, price, overhauls, shape)
    if shape.kind == "s_shaped":
        return _s_shaped(model, H, price, shape.inflection, overhauls, shape)
    return _general(model, H, price, overhauls, shape)


def _relative_overhauls(instance, H):
    return tuple(t for t in instance.overhauls if t < H)


def solve_convex(instance, price=None, horizon=None):
    """Even spacing with the count found by scanning ``N`` until cost stops falling.

    Valid for convex cycle costs, where the evenly spaced cost is convex in ``N``.
    """
    H = _horizon(instance, horizon)
    return _convex(instance.model, H, _price(instance, price), _relative_overhauls(instance, H))


def solve_concave(instance, price=None, horizon=None):
    """Concave cycle costs: never upgrading is optimal."""
    H = _horizon(instance, horizon)
    return _concave(instance.model, H, _price(instance, price), _relative_overhauls(instance, H))


def solve_s_shaped(instance, price=None, horizon=None, inflection=None):
    """Best of even spacing, no upgrades, and even spacing with a longer final cycle.

    ``inflection`` defaults to the one found by :func:`classify_shape`.
    """
    H = _horizon(instance, horizon)
    if inflection is None:
        shape = classify_shape(instance.model, H)
        if shape.kind != "s_shaped":
            raise ValueError(f"cycle cost is {shape.kind}, not S-shaped, on [0, {H}]")
        inflection = shape.inflection
    return _s_shaped(instance.model, H, _price(instance, price), inflection, _relative_overhauls(instance, H))


def solve_general_numeric(instance, price=None, horizon=None, seed=0):
    """Numeric fallback for arbitrary cycle-cost shapes.

    For every admissible ``N`` the cycle lengths are optimized on the simplex
    from 32 starts (even split plus Dirichlet draws) by projected gradient
    descent, pairwise exchange moves and averaging of cycles with equal
    marginal cost. The result is flagged ``heuristic``.
    """
    H = _horizon(instance, horizon)
    return _general(instance.model, H, _price(instance, price), _relative_overhauls(instance, H), seed=seed)


def solve_base(instance, price=None, horizon=None):
    """Classify the cycle cost on ``[0, horizon]`` and run the matching solver."""
    H = _horizon(instance, horizon)
    return _dispatch(instance.model, H, _price(instance, price), _relative_overhauls(instance, H))
