"""Tests for the flowgraph IR: constants, plans, transposition, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dctflow.factorizer import identity_plan, kok_plan
from dctflow.flowgraph import (
    MINUS_ONE,
    ONE,
    Add,
    ExactConstant,
    Input,
    OpCount,
    Output,
    PlanBuilder,
    PlanGraph,
    Scale,
    count_ops,
    load_plan,
    plan_from_dict,
    plan_to_dict,
    prune,
    save_plan,
    to_dot,
    transpose,
)
from dctflow.oracle import b_matrix, dct3_matrix

PLAN6 = kok_plan(6)


def test_from_value_classifies():
    assert ExactConstant.from_value(1.0) == ONE
    assert ExactConstant.from_value(-1.0) == MINUS_ONE
    assert ExactConstant.from_value(2.0).kind == "shift"
    assert ExactConstant.from_value(-0.25).kind == "shift"
    assert ExactConstant.from_value(0.7).kind == "mult"
    assert ExactConstant.from_value(math.sqrt(2.0)).kind == "mult"


def test_from_value_rejects_bad():
    for bad in (0.0, math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError):
            ExactConstant.from_value(bad)


def test_constant_validation():
    with pytest.raises(ValueError):
        ExactConstant(1, 0, 2.5)
    with pytest.raises(ValueError):
        ExactConstant(1, 0, 0.9)
    with pytest.raises(ValueError):
        ExactConstant(2, 0, 1.0)


def test_sqrt2_squared_is_a_shift():
    c = ExactConstant.from_value(math.sqrt(2.0))
    prod = c * c
    assert prod.kind == "shift"
    assert prod.exponent == 1
    assert prod.value() == 2.0


def test_dyadic_cancellation_is_exact():
    two = ExactConstant.from_value(2.0)
    half = ExactConstant.from_value(0.5)
    assert two * half == ONE
    assert (two * half).kind == "free"


def test_near_power_snaps():
    c = ExactConstant.from_value(2.0 * (1.0 + 1e-13))
    assert c.is_unit_magnitude and c.exponent == 1


@given(st.integers(-40, 40), st.integers(-40, 40))
def test_power_products_exact(a, b):
    prod = ExactConstant.from_value(2.0**a) * ExactConstant.from_value(2.0**b)
    assert prod.is_unit_magnitude
    assert prod.exponent == a + b


@given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False, allow_infinity=False))
def test_from_value_roundtrip(v):
    for value in (v, -v):
        c = ExactConstant.from_value(value)
        if c.mantissa == 1.0:
            # possibly snapped onto a power of two
            assert abs(c.value() - value) <= abs(value) * 1e-12
        else:
            assert c.value() == value


def test_constant_dict_round_trip():
    for value in (0.5, -3.75, math.cos(math.pi / 8)):
        c = ExactConstant.from_value(value)
        assert ExactConstant.from_dict(c.to_dict()) == c


def test_opcount_addition():
    assert OpCount(1, 2, 3) + OpCount(4, 5, 6) == OpCount(5, 7, 9)
    assert OpCount(1, 2, 3).as_tuple() == (1, 2, 3)


def test_plan_rejects_forward_reference():
    with pytest.raises(ValueError, match="not earlier"):
        PlanGraph(1, 1, (Input(0), Add(0, 2), Output(0, 1)))


def test_plan_rejects_reading_an_output():
    with pytest.raises(ValueError, match="reads from output"):
        PlanGraph(1, 1, (Input(0), Output(0, 0), Scale(1, ONE)))


def test_plan_rejects_duplicate_output_index():
    with pytest.raises(ValueError, match="bad output index"):
        PlanGraph(1, 1, (Input(0), Output(0, 0), Output(0, 0)))


def test_plan_rejects_missing_inputs():
    with pytest.raises(ValueError, match="declares 2 inputs"):
        PlanGraph(2, 1, (Input(0), Output(0, 0)))


def test_plan_rejects_bad_sign():
    with pytest.raises(ValueError, match="sign_b"):
        PlanGraph(1, 1, (Input(0), Add(0, 0, 2), Output(0, 1)))


def _butterfly():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(x[0], x[1]))
    builder.output(builder.sub(x[0], x[1]))
    return builder.build()


def test_butterfly_matches_hand_values():
    plan = _butterfly()
    assert np.array_equal(plan.evaluate([1.0, 2.0]), [3.0, -1.0])
    assert np.array_equal(plan.to_matrix(), b_matrix(2))


def test_identity_plan_passes_through():
    assert np.array_equal(identity_plan(2).evaluate([3.0, 5.0]), [3.0, 5.0])


def test_evaluate_rejects_bad_input():
    plan = _butterfly()
    with pytest.raises(ValueError):
        plan.evaluate([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        plan.evaluate([1.0, math.nan])
    with pytest.raises(ValueError):
        plan.evaluate(np.ones((2, 2)))


def test_apply_batches_over_leading_axes():
    x = np.random.default_rng(1).uniform(-1, 1, (3, 5, 6))
    out = PLAN6.apply(x)
    assert out.shape == (3, 5, 6)
    assert np.allclose(out[1, 2], PLAN6.evaluate(x[1, 2]), atol=1e-14)


def test_kok6_basis_column():
    e0 = np.eye(6)[0]
    from dctflow.oracle import dct2_matrix

    assert np.max(np.abs(PLAN6.evaluate(e0) - dct2_matrix(6)[:, 0])) < 1e-12


def test_count_ops_kinds():
    builder = PlanBuilder()
    x = builder.inputs(1)
    a = builder.scale(x[0], -1.0)  # free
    b = builder.scale(a, 4.0)  # shift
    c = builder.scale(b, 0.3)  # mult
    builder.output(builder.add(c, c))
    plan = builder.build()
    assert plan.count_ops() == OpCount(1, 1, 1)
    assert count_ops(plan) == plan.count_ops()


@settings(deadline=None, max_examples=25)
@given(
    st.lists(st.floats(-1, 1), min_size=6, max_size=6),
    st.lists(st.floats(-1, 1), min_size=6, max_size=6),
    st.floats(-1, 1),
    st.floats(-1, 1),
)
def test_plan_linearity(x, y, a, b):
    x, y = np.array(x), np.array(y)
    lhs = PLAN6.evaluate(a * x + b * y)
    rhs = a * PLAN6.evaluate(x) + b * PLAN6.evaluate(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_transpose_of_identity_behaves():
    t = transpose(identity_plan(3))
    assert np.array_equal(t.to_matrix(), np.eye(3))


def test_transpose_matches_matrix_transpose():
    p = kok_plan(4)
    t = transpose(p)
    assert np.max(np.abs(t.to_matrix() - p.to_matrix().T)) < 1e-12
    assert np.max(np.abs(t.to_matrix() - dct3_matrix(4))) < 1e-12


def test_transpose_preserves_counts():
    for n in (2, 4, 6, 8, 12):
        p = kok_plan(n)
        assert transpose(p).count_ops() == p.count_ops()


def test_double_transpose_round_trip():
    p = kok_plan(8)
    tt = transpose(transpose(p))
    assert np.max(np.abs(tt.to_matrix() - p.to_matrix())) < 1e-12
    assert tt.count_ops() == p.count_ops()


def test_transpose_rejects_unused_input():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(x[0])
    with pytest.raises(ValueError, match="unused"):
        transpose(builder.build())


def test_prune_drops_dead_arithmetic():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.scale(x[1], 0.3)  # dead
    builder.output(builder.add(x[0], x[1]))
    plan = builder.build()
    pruned = prune(plan)
    assert len(pruned.nodes) == len(plan.nodes) - 1
    assert pruned.count_ops() == OpCount(0, 1, 0)
    assert np.array_equal(pruned.to_matrix(), plan.to_matrix())


def test_splice_checks_arity():
    builder = PlanBuilder()
    x = builder.inputs(1)
    with pytest.raises(ValueError):
        builder.splice(_butterfly(), x)


def test_plan_json_round_trip(tmp_path):
    plan = kok_plan(6)
    path = tmp_path / "plan.json"
    save_plan(plan, str(path))
    assert load_plan(str(path)) == plan


def test_plan_dict_round_trip():
    plan = kok_plan(4)
    assert plan_from_dict(plan_to_dict(plan)) == plan


def test_plan_from_dict_rejects_unknown_op():
    with pytest.raises(ValueError, match="unknown node op"):
        plan_from_dict({"n_inputs": 1, "n_outputs": 1, "nodes": [{"op": "wobble"}]})


def test_load_plan_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValueError):
        load_plan(str(path))


def test_to_dot_structure():
    dot = to_dot(kok_plan(4))
    assert dot.startswith("digraph")
    assert dot.count('label="in') == 4
    assert dot.count('label="out') == 4
    assert "style=dashed" in dot
