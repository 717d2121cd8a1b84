"""Scalar functions of age.

Every family evaluates on floats or numpy arrays, knows its analytic
derivative and its primitive ``∫_0^t f``, and can describe itself as a list of
shifted power terms ``c·(t - s)^p`` where that is possible. The power-term
form is what makes products such as ``k(t)·h(t)`` integrable in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .quadrature import cumulative_integral

__all__ = [
    "Function",
    "Constant",
    "Polynomial",
    "Power",
    "Logistic",
    "Sum",
    "Scaled",
    "Piecewise",
    "Term",
    "integrate_product",
    "function_from_dict",
]


class Term(NamedTuple):
    """``coef · (t - shift) ** power``."""

    coef: float
    power: float
    shift: float


def _wrap(result, t):
    if np.ndim(t) == 0:
        return float(result)
    return result


class Function:
    """Base class. Subclasses implement the underscore methods on arrays."""

    family = ""

    def __call__(self, t):
        return _wrap(self._value(np.asarray(t, dtype=float)), t)

    def derivative(self, t):
        return _wrap(self._derivative(np.asarray(t, dtype=float)), t)

    def primitive(self, t):
        """``∫_0^t f(s) ds``."""
        return _wrap(self._primitive(np.asarray(t, dtype=float)), t)

    def breakpoints(self):
        """Interior ages where the function or its derivative may jump."""
        return ()

    @property
    def domain(self):
        return (0.0, math.inf)

    def terms(self, lo, hi):
        """Power-term form valid on ``[lo, hi]``, or None if there is none."""
        return None

    def to_dict(self):
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, other))

    def __mul__(self, alpha):
        return Scaled(float(alpha), self)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Constant(Function):
    value: float

    family = "constant"

    def _value(self, t):
        return np.full(t.shape, float(self.value))

    def _derivative(self, t):
        return np.zeros(t.shape)

    def _primitive(self, t):
        return self.value * t

    def terms(self, lo, hi):
        return [Term(float(self.value), 0.0, 0.0)]

    def to_dict(self):
        return {"family": self.family, "value": self.value}


@dataclass(frozen=True)
class Polynomial(Function):
    """``Σ coefficients[i] · (t - origin)^i``.

    ``origin`` defaults to 0; a nonzero origin keeps pieces such as
    ``30 (t - 4.9)^2`` exact instead of expanding them around zero.
    """

    coefficients: tuple
    origin: float = 0.0

    family = "polynomial"

    def __post_init__(self):
        coefficients = tuple(float(c) for c in self.coefficients) or (0.0,)
        object.__setattr__(self, "coefficients", coefficients)

    def _value(self, t):
        return np.polynomial.polynomial.polyval(t - self.origin, self.coefficients)

    def _derivative(self, t):
        d = np.polynomial.polynomial.polyder(self.coefficients) if len(self.coefficients) > 1 else [0.0]
        return np.polynomial.polynomial.polyval(t - self.origin, d) + np.zeros(t.shape)

    @cached_property
    def _antiderivative(self):
        P = np.polynomial.polynomial.polyint(self.coefficients)
        return P, float(np.polynomial.polynomial.polyval(-self.origin, P))

    def _primitive(self, t):
        P, at_zero = self._antiderivative
        return np.polynomial.polynomial.polyval(t - self.origin, P) - at_zero

    def terms(self, lo, hi):
        return [Term(c, float(i), self.origin) for i, c in enumerate(self.coefficients) if c != 0.0]

    def to_dict(self):
        d = {"family": self.family, "coefficients": list(self.coefficients)}
        if self.origin:
            d["origin"] = self.origin
        return d


@dataclass(frozen=True)
class Power(Function):
    """``scale · (t - origin)^exponent`` with ``exponent >= 0``, defined for ``t >= origin``."""

    scale: float
    exponent: float
    origin: float = 0.0

    family = "power"

    def __post_init__(self):
        if not self.exponent >= 0:
            raise DomainError(f"power exponent must be >= 0, got {self.exponent}")

    @property
    def domain(self):
        return (self.origin, math.inf)

    def _value(self, t):
        u = t - self.origin
        if np.any(u < 0):
            raise DomainError(f"power family is undefined below age {self.origin}")
        return self.scale * np.power(u, self.exponent)

    def _derivative(self, t):
        p = self.exponent
        if p == 0:
            return np.zeros(t.shape)
        with np.errstate(divide="ignore"):
            return self.scale * p * np.power(t - self.origin, p - 1.0)

    def _primitive(self, t):
        p = self.exponent
        o = self.origin
        return self.scale * (np.power(t - o, p + 1.0) - (-o) ** (p + 1.0)) / (p + 1.0)

    def terms(self, lo, hi):
        return [Term(float(self.scale), float(self.exponent), float(self.origin))]

    def to_dict(self):
        d = {"family": self.family, "scale": self.scale, "exponent": self.exponent}
        if self.origin:
            d["origin"] = self.origin
        return d


@dataclass(frozen=True)
class Logistic(Function):
    """``height / (1 + exp(-steepness · (t - midpoint)))``."""

    height: float
    steepness: float
    midpoint: float

    family = "logistic"

    def _unit(self, t):
        # expit without scipy: stable for large |argument|
        z = self.steepness * (t - self.midpoint)
        return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))

    def _value(self, t):
        return self.height * self._unit(t)

    def _derivative(self, t):
        s = self._unit(t)
        return self.height * self.steepness * s * (1.0 - s)

    def _primitive(self, t):
        k = self.steepness
        if k == 0:
            return 0.5 * self.height * t
        return (self.height / k) * (
            np.logaddexp(0.0, k * (t - self.midpoint)) - np.logaddexp(0.0, -k * self.midpoint)
        )

    def terms(self, lo, hi):
        if self.steepness == 0:
            return [Term(0.5 * self.height, 0.0, 0.0)]
        return None

    def to_dict(self):
        return {
            "family": self.family,
            "height": self.height,
            "steepness": self.steepness,
            "midpoint": self.midpoint,
        }


@dataclass(frozen=True)
class Sum(Function):
    parts: tuple

    family = "sum"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def _value(self, t):
        return sum((p._value(t) for p in self.parts), np.zeros(t.shape))

    def _derivative(self, t):
        return sum((p._derivative(t) for p in self.parts), np.zeros(t.shape))

    def _primitive(self, t):
        return sum((p._primitive(t) for p in self.parts), np.zeros(t.shape))

    def breakpoints(self):
        return tuple(sorted({b for p in self.parts for b in p.breakpoints()}))

    @property
    def domain(self):
        lo = max((p.domain[0] for p in self.parts), default=0.0)
        hi = min((p.domain[1] for p in self.parts), default=math.inf)
        return (lo, hi)

    def terms(self, lo, hi):
        out = []
        for p in self.parts:
            ts = p.terms(lo, hi)
            if ts is None:
                return None
            out.extend(ts)
        return out

    def to_dict(self):
        return {"family": self.family, "terms": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True)
class Scaled(Function):
    factor: float
    function: Function

    family = "scaled"

    def _value(self, t):
        return self.factor * self.function._value(t)

    def _derivative(self, t):
        return self.factor * self.function._derivative(t)

    def _primitive(self, t):
        return self.factor * self.function._primitive(t)

    def breakpoints(self):
        return self.function.breakpoints()

    @property
    def domain(self):
        return self.function.domain

    def terms(self, lo, hi):
        ts = self.function.terms(lo, hi)
        if ts is None:
            return None
        return [Term(self.factor * c, p, s) for c, p, s in ts]

    def to_dict(self):
        return {"family": self.family, "factor": self.factor, "function": self.function.to_dict()}


@dataclass(frozen=True)
class Piecewise(Function):
    """Functions glued on consecutive intervals ``(lo, hi, function)``.

    Pieces are evaluated at absolute age. At an interior breakpoint the piece
    starting there is used, which makes the derivative right-continuous; at
    the right end of the domain the last piece applies.
    """

    pieces: tuple

    family = "piecewise"

    def __post_init__(self):
        pieces = tuple((float(lo), float(hi), f) for lo, hi, f in self.pieces)
        if not pieces:
            raise DomainError("piecewise function needs at least one piece")
        for i, (lo, hi, _) in enumerate(pieces):
            if not hi > lo:
                raise DomainError(f"piece {i}: interval [{lo}, {hi}] is empty")
            if i and lo != pieces[i - 1][1]:
                raise DomainError(f"piece {i}: starts at {lo} but previous piece ends at {pieces[i - 1][1]}")
        object.__setattr__(self, "pieces", pieces)

    @property
    def domain(self):
        return (self.pieces[0][0], self.pieces[-1][1])

    def breakpoints(self):
        inner = {lo for lo, _, _ in self.pieces[1:]}
        for _, _, f in self.pieces:
            inner.update(f.breakpoints())
        return tuple(sorted(inner))

    def _index(self, t):
        lo, hi = self.domain
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise DomainError(f"age outside piecewise domain [{lo}, {hi}]")
        starts = np.array([p[0] for p in self.pieces])
        return np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(self.pieces) - 1)

    def _dispatch(self, t, method):
        idx = self._index(t)
        out = np.empty(t.shape)
        for i, (_, _, f) in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = getattr(f, method)(t[mask])
        return out

    def _value(self, t):
        return self._dispatch(t, "_value")

    def _derivative(self, t):
        return self._dispatch(t, "_derivative")

    def _primitive(self, t):
        idx = self._index(t)
        # accumulated integral at the start of each piece
        acc = [0.0]
        for lo, hi, f in self.pieces[:-1]:
            acc.append(acc[-1] + float(f._primitive(np.array(hi)) - f._primitive(np.array(lo))))
        out = np.empty(t.shape)
        for i, (lo, _, f) in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = acc[i] + f._primitive(t[mask]) - float(f._primitive(np.array(lo)))
        return out

    def terms(self, lo, hi):
        mid = 0.5 * (lo + hi)
        i = int(self._index(np.array(mid)))
        return self.pieces[i][2].terms(lo, hi)

    def to_dict(self):
        return {
            "family": self.family,
            "pieces": [{"interval": [lo, hi], "function": f.to_dict()} for lo, hi, f in self.pieces],
        }


def _is_integer(p):
    return float(p).is_integer()


def _recenter(term, shift):
    """Expand an integer-power term around ``shift``."""
    c, p, s = term
    n = int(p)
    d = shift - s
    return [Term(c * math.comb(n, j) * d ** (n - j), float(j), shift) for j in range(n + 1)]


def _multiply_terms(a, b):
    out = []
    for ta in a:
        for tb in b:
            if ta.shift == tb.shift:
                out.append(Term(ta.coef * tb.coef, ta.power + tb.power, ta.shift))
            elif _is_integer(tb.power):
                out.extend(Term(ta.coef * r.coef, ta.power + r.power, ta.shift) for r in _recenter(tb, ta.shift))
            elif _is_integer(ta.power):
                out.extend(Term(tb.coef * r.coef, tb.power + r.power, tb.shift) for r in _recenter(ta, tb.shift))
            else:
                return None
    return out


def _terms_integral(terms, lo, t):
    total = np.zeros(np.shape(t))
    for c, p, s in terms:
        if c == 0.0:
            continue
        total = total + c * (np.power(t - s, p + 1.0) - (lo - s) ** (p + 1.0)) / (p + 1.0)
    return total


def _constant_of(terms):
    if terms is not None and all(p == 0.0 for _, p, _ in terms):
        return sum(c for c, _, _ in terms)
    return None


def integrate_product(f, g, t):
    """``∫_0^t f(s) g(s) ds`` for an array of ages ``t``.

    The range is cut at the breakpoints of both factors. On each panel the
    product is integrated in closed form when one factor is constant there or
    both factors have power-term forms; otherwise adaptive quadrature is used.
    """
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return np.zeros(t.shape)
    starts, methods, full = _panel_plan(f, g)
    panel_at = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    out = np.empty(t.shape)
    product = _product(f, g)
    for i in np.unique(panel_at):
        mask = panel_at == i
        out[mask] = full[i] + _panel(methods[i], starts[i], t[mask], product)
    return out


def _product(f, g):
    return lambda x: f._value(x) * g._value(x)


def _panel_method(f, g, lo, hi):
    tf, tg = f.terms(lo, hi), g.terms(lo, hi)
    cf, cg = _constant_of(tf), _constant_of(tg)
    if cf is not None:
        return ("scale", cf, g)
    if cg is not None:
        return ("scale", cg, f)
    prod = _multiply_terms(tf, tg) if tf is not None and tg is not None else None
    usable = prod is not None and all(_is_integer(p) or lo - s >= 0.0 for _, p, s in prod)
    return ("terms", prod) if usable else ("quad",)


@lru_cache(maxsize=256)
def _panel_plan(f, g):
    """Panel starts, integration method per panel, and the integral up to each start.

    Panels run between consecutive breakpoints of either factor; the last
    one is open-ended.
    """
    starts = [0.0] + sorted({b for b in f.breakpoints() + g.breakpoints() if b > 0.0})
    product = _product(f, g)
    methods, full = [], [0.0]
    for i, lo in enumerate(starts):
        hi = starts[i + 1] if i + 1 < len(starts) else lo + 1e-6 * (1.0 + lo)
        methods.append(_panel_method(f, g, lo, hi))
        if i + 1 < len(starts):
            full.append(full[-1] + float(_panel(methods[-1], lo, np.array([hi]), product)[0]))
    return np.array(starts), tuple(methods), tuple(full)


def _panel(method, lo, t, product):
    kind = method[0]
    if kind == "scale":
        _, c, h = method
        return c * (h._primitive(t) - float(h._primitive(np.array(lo))))
    if kind == "terms":
        return _terms_integral(method[1], lo, t)
    return cumulative_integral(product, lo, t)


_FAMILIES = {
    "constant": lambda d: Constant(float(d["value"])),
    "polynomial": lambda d: Polynomial(tuple(d["coefficients"]), float(d.get("origin", 0.0))),
    "power": lambda d: Power(float(d["scale"]), float(d["exponent"]), float(d.get("origin", 0.0))),
    "logistic": lambda d: Logistic(float(d["height"]), float(d["steepness"]), float(d["midpoint"])),
    "sum": lambda d: Sum(tuple(function_from_dict(x) for x in d["terms"])),
    "scaled": lambda d: Scaled(float(d["factor"]), function_from_dict(d["function"])),
    "piecewise": lambda d: Piecewise(
        tuple((p["interval"][0], p["interval"][1], function_from_dict(p["function"])) for p in d["pieces"])
    ),
}


def function_from_dict(d):
    """Inverse of ``Function.to_dict``."""
    if not isinstance(d, dict) or "family" not in d:
        raise DomainError("function entry must be an object with a 'family' tag")
    try:
        build = _FAMILIES[d["family"]]
    except KeyError:
        raise DomainError(f"unknown function family {d['family']!r}") from None
    try:
        return build(d)
    except KeyError as exc:
        raise DomainError(f"{d['family']} function is missing parameter {exc.args[0]!r}") from None
