"""One-dimensional minimization: grid scan followed by golden-section refinement."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2


def golden_section(f, a, b, tol):
    """Shrink ``[a, b]`` around a local minimum of ``f`` until narrower than ``tol``.

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c, d = a + INV_PHI2 * h, a + INV_PHI * h
    yc, yd = f(c), f(d)
    best = min((yc, c), (yd, d))
    for _ in range(n):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            yc = f(c)
            best = min(best, (yc, c))
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
            best = min(best, (yd, d))
    return best[1], best[0]


def grid_golden_min(f_vec, a, b, points=1024, tol=None):
    """Global-ish minimum of ``f_vec`` on ``[a, b]``.

    ``f_vec`` is evaluated on a uniform grid in one call; the best grid
    bracket is then refined by golden section. Endpoints stay candidates, so
    minima on the boundary are kept exactly.
    """
    if tol is None:
        tol = 1e-10 * max(abs(b), 1.0)
    if b <= a:
        return a, float(f_vec(np.array([a]))[0])
    grid = np.linspace(a, b, points)
    vals = np.asarray(f_vec(grid), dtype=float)
    i = int(np.argmin(vals))
    x_best, y_best = float(grid[i]), float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, points - 1)]

    def f(x):
        return float(f_vec(np.array([x]))[0])

    x, y = golden_section(f, float(lo), float(hi), tol)
    if y < y_best:
        return x, y
    return x_best, y_best
