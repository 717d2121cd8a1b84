"""JSON instance documents.

A document is one JSON object::

    {
      "horizon": 30,
      "price": 4,
      "penalty": 1.5,                      # number, or the string "infinity"
      "overhauls": [10, 20],               # or {"count": 2, "placement": "equidistant"}
      "cost_model": {"cycle_cost": F}      # or {"salvage": F, "gap": F,
                                           #     "repair_cost": F, "failure_rate": F}
    }

``cost_model`` may also carry ``"validation_samples"``. Each ``F`` is a
function object tagged by ``"family"``:

============  ==========================================================================
family        parameters
============  ==========================================================================
constant      ``value``
polynomial    ``coefficients`` (constant term first), optional ``origin``
power         ``scale``, ``exponent``, optional ``origin`` (``scale·(t-origin)^exponent``)
logistic      ``height``, ``steepness``, ``midpoint``
sum           ``terms``: list of functions
scaled        ``factor``, ``function``
piecewise     ``pieces``: list of ``{"interval": [lo, hi], "function": F}``
============  ==========================================================================
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import DomainError, InstanceError, InstanceSyntaxError
from .functions import function_from_dict
from .model import INFINITY, CostModel, Instance
from .sensitivity import equidistant_overhauls

__all__ = ["parse_instance", "serialize_instance", "load_instance", "instance_to_dict", "instance_from_dict"]

_COMPONENTS = ("salvage", "gap", "repair_cost", "failure_rate")


def _number(d, key, field=None):
    field = field or key
    if key not in d:
        raise InstanceError(field, "missing")
    x = d[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InstanceError(field, f"must be a number, got {x!r}")
    return float(x)


def _function(d, key, field):
    if key not in d:
        raise InstanceError(field, "missing")
    try:
        return function_from_dict(d[key])
    except (DomainError, TypeError, ValueError, IndexError) as exc:
        raise InstanceError(field, str(exc)) from None


def _cost_model(d):
    if not isinstance(d, dict):
        raise InstanceError("cost_model", "must be an object")
    samples = int(d.get("validation_samples", 2048))
    if "cycle_cost" in d:
        extra = [k for k in _COMPONENTS if k in d]
        if extra:
            raise InstanceError("cost_model", f"give cycle_cost or the components, not both (found {extra})")
        return CostModel.direct(_function(d, "cycle_cost", "cost_model.cycle_cost"), validation_samples=samples)
    parts = [_function(d, k, f"cost_model.{k}") for k in _COMPONENTS]
    return CostModel.components(*parts, validation_samples=samples)


def _penalty(d):
    if "penalty" not in d:
        return 0.0
    x = d["penalty"]
    if x == "infinity":
        return INFINITY
    return _number(d, "penalty")


def _overhauls(d, horizon):
    x = d.get("overhauls", [])
    if isinstance(x, dict):
        if x.get("placement") != "equidistant":
            raise InstanceError("overhauls.placement", "only 'equidistant' is supported")
        m = x.get("count")
        if isinstance(m, bool) or not isinstance(m, int) or m < 0:
            raise InstanceError("overhauls.count", f"must be a non-negative integer, got {m!r}")
        return equidistant_overhauls(horizon, m)
    if not isinstance(x, list):
        raise InstanceError("overhauls", "must be a list of times or {count, placement}")
    for i, t in enumerate(x):
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise InstanceError(f"overhauls[{i}]", f"must be a number, got {t!r}")
    return tuple(float(t) for t in x)


def instance_from_dict(d) -> Instance:
    if not isinstance(d, dict):
        raise InstanceError("document", "top level must be an object")
    horizon = _number(d, "horizon")
    if "cost_model" not in d:
        raise InstanceError("cost_model", "missing")
    return Instance(
        horizon=horizon,
        price=_number(d, "price"),
        penalty=_penalty(d),
        overhauls=_overhauls(d, horizon),
        model=_cost_model(d["cost_model"]),
    )


def parse_instance(document: str) -> Instance:
    """Parse and validate a JSON instance document.

    Raises
    ------
    InstanceSyntaxError
        Malformed JSON, with line and column.
    InstanceError
        A well-formed document describing an invalid instance; ``field``
        names the offending entry.
    """
    try:
        d = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return instance_from_dict(d)


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def instance_to_dict(instance: Instance) -> dict:
    model = instance.model
    cm = {name: f.to_dict() for name, f in model.functions().items()}
    if model.is_direct:
        cm = {"cycle_cost": cm["cycle"]}
    if model.validation_samples != 2048:
        cm["validation_samples"] = model.validation_samples
    return {
        "horizon": instance.horizon,
        "price": instance.price,
        "penalty": "infinity" if math.isinf(instance.penalty) else instance.penalty,
        "overhauls": list(instance.overhauls),
        "cost_model": cm,
    }


def serialize_instance(instance: Instance) -> str:
    """JSON text that :func:`parse_instance` turns back into an equal instance."""
    return json.dumps(instance_to_dict(instance), indent=2)
