import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import load, random_model

from upgradeplan import (
    CostModel,
    DomainError,
    Instance,
    InstanceError,
    TechnicalRequirementError,
    classify_shape,
    eval_cycle_cost,
    eval_cycle_cost_derivative,
    find_inflection,
    upper_bound_upgrades,
)
from upgradeplan.functions import Constant, Logistic, Piecewise, Polynomial, Power, Sum

SETTING_A = load("setting_a")
UNEQUAL = load("unequal_final_cycle")
LOGISTIC = load("logistic")


def direct(f):
    return CostModel.direct(f)


def test_setting_a_full_cycle():
    assert eval_cycle_cost(SETTING_A.model, 30.0) == pytest.approx(32.9653, abs=1e-3)


def test_vanishing_components():
    zero = Constant(0.0)
    m = CostModel.components(zero, zero, zero, zero)
    assert eval_cycle_cost(m, 7.3) == 0.0


@pytest.mark.parametrize("t, value", [(4.9, -0.15), (5.0, 0.015), (10.0, 0.765)])
def test_unequal_example_piecewise_cost(t, value):
    assert eval_cycle_cost(UNEQUAL.model, t) == pytest.approx(value, abs=1e-12)


def test_age_outside_horizon_rejected():
    with pytest.raises(DomainError):
        eval_cycle_cost(SETTING_A.model, 31.0, horizon=30.0)
    with pytest.raises(DomainError):
        eval_cycle_cost(SETTING_A.model, -1.0)


@pytest.mark.parametrize(
    "model, t, value",
    [
        (SETTING_A.model, 0.0, 1 / 3),
        (direct(Constant(2.0)), 4.0, 0.0),
        (LOGISTIC.model, 10.0, 0.25),
    ],
)
def test_derivative_examples(model, t, value):
    assert eval_cycle_cost_derivative(model, t) == pytest.approx(value, abs=1e-12)


def test_derivative_right_hand_at_kink():
    # gap jumps to 0.15 at 4.9; the salvage slope is still zero there
    assert eval_cycle_cost_derivative(UNEQUAL.model, 4.9) == pytest.approx(0.15)
    assert eval_cycle_cost_derivative(UNEQUAL.model, 4.95) == pytest.approx(3.15)


def test_cost_at_zero_is_minus_initial_salvage():
    assert eval_cycle_cost(UNEQUAL.model, 0.0) == -UNEQUAL.model.initial_salvage


@pytest.mark.parametrize(
    "model, horizon, kind, x",
    [
        (SETTING_A.model, 30.0, "convex", None),
        (load("setting_b").model, 30.0, "convex", None),
        (UNEQUAL.model, 10.0, "s_shaped", 4.95),
        (LOGISTIC.model, 30.0, "s_shaped", 10.0),
        (direct(Sum((Power(1.0, 0.5, origin=-1.0), Constant(-1.0)))), 10.0, "concave", None),
    ],
)
def test_classify(model, horizon, kind, x):
    shape = classify_shape(model, horizon)
    assert shape.kind == kind
    if x is not None:
        assert shape.inflection == pytest.approx(x, abs=1e-8)


def test_str_of_shape():
    assert str(classify_shape(UNEQUAL.model, 10.0)) == "SShaped, x = 4.95"
    assert str(classify_shape(SETTING_A.model, 30.0)) == "Convex"


def plateau_model():
    """Convex on [0, 2], linear on [2, 3], concave on [3, 5]."""
    return direct(
        Piecewise(
            (
                (0.0, 2.0, Polynomial((0.0, 0.0, 1.0))),
                (2.0, 3.0, Polynomial((4.0, 4.0), origin=2.0)),
                (3.0, 5.0, Polynomial((8.0, 4.0, -1.0), origin=3.0)),
            )
        )
    )


def test_inflection_at_plateau_end():
    assert find_inflection(plateau_model(), 5.0) == pytest.approx(3.0, abs=1e-8)


@pytest.mark.parametrize("model, horizon, x", [(LOGISTIC.model, 30.0, 10.0), (UNEQUAL.model, 10.0, 4.95)])
def test_find_inflection(model, horizon, x):
    assert find_inflection(model, horizon) == pytest.approx(x, abs=1e-8)


def test_find_inflection_rejects_convex():
    with pytest.raises(TechnicalRequirementError):
        find_inflection(SETTING_A.model, 30.0)


def test_convex_concave_convex_is_general():
    # logistic bump followed by a steep quadratic
    m = direct(Sum((Logistic(1.0, 3.0, 3.0), Polynomial((0.0, 0.0, 0.0, 0.01), origin=0.0))))
    shape = classify_shape(m, 12.0)
    assert shape.kind == "general"
    flags = [p[2] for p in shape.pieces]
    assert all(a != b for a, b in zip(flags[:-1], flags[1:]))
    assert shape.pieces[0][0] == 0.0 and shape.pieces[-1][1] == 12.0


def test_upper_bound_examples():
    assert upper_bound_upgrades(UNEQUAL) == 1
    assert upper_bound_upgrades(SETTING_A) == 8
    flat = Instance(10.0, 1.0, 0.0, (), direct(Constant(-0.15)))
    assert upper_bound_upgrades(flat) == 0


def test_price_must_exceed_initial_salvage():
    with pytest.raises(InstanceError) as info:
        UNEQUAL.with_(price=0.15)
    assert info.value.field == "price"


def test_validation_names_component():
    m = CostModel.components(Polynomial((1.0, 0.1)), Constant(0.0), Constant(1.0), Constant(0.1))
    with pytest.raises(InstanceError) as info:
        Instance(5.0, 2.0, 0.0, (), m)
    assert info.value.field == "cost_model.salvage"


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), horizon=st.floats(2.0, 30.0))
def test_components_cost_non_decreasing(seed, horizon):
    model = random_model(np.random.default_rng(seed), horizon)
    t = np.sort(np.random.default_rng(seed + 1).uniform(0, horizon, 200))
    c = eval_cycle_cost(model, t)
    assert np.all(np.diff(c) >= -1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), horizon=st.floats(2.0, 30.0))
def test_cost_derivative_matches_finite_difference(seed, horizon):
    model = random_model(np.random.default_rng(seed), horizon)
    t = np.random.default_rng(seed + 2).uniform(0.01 * horizon, 0.99 * horizon, 100)
    h = 1e-6
    fd = (eval_cycle_cost(model, t + h) - eval_cycle_cost(model, t - h)) / (2 * h)
    np.testing.assert_allclose(eval_cycle_cost_derivative(model, t), fd, atol=1e-5, rtol=1e-5)


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.0, 2.0), b=st.floats(0.01, 2.0), horizon=st.floats(1.0, 20.0))
def test_classify_known_curvature(a, b, horizon):
    up = classify_shape(direct(Polynomial((0.0, a, b))), horizon)
    down = classify_shape(direct(Polynomial((0.0, a, -b))), horizon)
    assert up.kind == "convex"
    assert down.kind == "concave"


@settings(max_examples=30, deadline=None)
@given(k=st.floats(0.5, 3.0), mid=st.floats(0.2, 0.8), horizon=st.floats(5.0, 30.0))
def test_classify_logistic_is_s_shaped(k, mid, horizon):
    shape = classify_shape(direct(Logistic(1.0, k, mid * horizon)), horizon)
    assert shape.kind == "s_shaped"
    assert shape.inflection == pytest.approx(mid * horizon, abs=1e-6)
