"""Batched adaptive Simpson quadrature.

All open subintervals are refined together, one numpy call per level, so
integrating a product over thousands of small panels costs a few dozen
vectorized integrand evaluations rather than thousands of Python calls.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

ABS_TOL = 1e-10
MAX_DEPTH = 60
# open subintervals allowed at once; bounds memory on integrands that never settle
MAX_ACTIVE = 1 << 18


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def integrate_panels(f, a, b, tol=ABS_TOL, max_depth=MAX_DEPTH):
    """Integrate ``f`` over each panel ``[a[i], b[i]]``.

    ``f`` must accept and return numpy arrays. The absolute tolerance is
    split among panels in proportion to their width, so the sum of all panel
    integrals meets ``tol``.

    Raises
    ------
    QuadratureError
        If the integrand is not finite, some panel has not converged after
        ``max_depth`` bisections, or more than ``MAX_ACTIVE`` subintervals are
        still open at one level.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out = np.zeros(a.shape)
    if a.size == 0:
        return out
    total = float(np.sum(np.abs(b - a)))
    if total == 0.0:
        return out

    owner = np.arange(a.size)
    lo, hi = a.copy(), b.copy()
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = f(lo), f(mid), f(hi)
    whole = _simpson(flo, fmid, fhi, hi - lo)
    eps = tol * np.abs(hi - lo) / total

    for _ in range(max_depth + 1):
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        f_lm = f(lm)
        f_rm = f(rm)
        left = _simpson(flo, f_lm, fmid, mid - lo)
        right = _simpson(fmid, f_rm, fhi, hi - mid)
        with np.errstate(invalid="ignore"):
            delta = left + right - whole
        if not np.all(np.isfinite(delta)):
            bad = ~np.isfinite(delta)
            raise QuadratureError(f"integrand is not finite on [{lo[bad].min():.6g}, {hi[bad].max():.6g}]")
        # second test is the roundoff floor: below it further halving is noise
        done = (np.abs(delta) <= 15.0 * eps) | (
            np.abs(delta) <= 64.0 * np.finfo(float).eps * np.abs(left + right)
        )
        np.add.at(out, owner[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            return out
        if 2 * np.count_nonzero(keep) > MAX_ACTIVE:
            raise QuadratureError(
                f"adaptive Simpson needs more than {MAX_ACTIVE} subintervals "
                f"on [{lo[keep].min():.6g}, {hi[keep].max():.6g}]"
            )
        owner = np.concatenate([owner[keep], owner[keep]])
        new_lo = np.concatenate([lo[keep], mid[keep]])
        new_hi = np.concatenate([mid[keep], hi[keep]])
        new_mid = np.concatenate([lm[keep], rm[keep]])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([f_lm[keep], f_rm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) / 2.0
        lo, hi, mid = new_lo, new_hi, new_mid
    raise QuadratureError(
        f"adaptive Simpson did not converge within depth {max_depth} "
        f"on [{lo.min():.6g}, {hi.max():.6g}]"
    )


def integrate(f, a, b, tol=ABS_TOL):
    """Integral of ``f`` over ``[a, b]`` as a float."""
    return float(integrate_panels(f, [a], [b], tol=tol)[0])


def cumulative_integral(f, start, t, tol=ABS_TOL):
    """``∫_start^t f`` for every entry of the array ``t`` (all ``t >= start``).

    The sorted evaluation points cut ``[start, max t]`` into panels that are
    integrated in one batch and then accumulated.
    """
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if flat.size == 0:
        return np.zeros(t.shape)
    knots, inverse = np.unique(flat, return_inverse=True)
    edges = np.concatenate([[start], knots])
    panels = integrate_panels(f, edges[:-1], edges[1:], tol=tol)
    values = np.cumsum(panels)
    return values[inverse].reshape(t.shape)
