"""Tests for the constant-folding pass."""

import math

import numpy as np

from dctflow.factorizer import kok_plan, merged_scaled_plan
from dctflow.flowgraph import OpCount, PlanBuilder
from dctflow.folding import fold


def _chain(c1, c2):
    builder = PlanBuilder()
    x = builder.inputs(1)
    builder.output(builder.scale(builder.scale(x[0], c1), c2))
    return builder.build()


def test_dyadic_chain_cancels_to_wire():
    folded = fold(_chain(2.0, 0.5))
    assert folded.count_ops() == OpCount(0, 0, 0)
    assert np.array_equal(folded.to_matrix(), np.eye(1))


def test_sqrt2_chain_blocked_to_protect_shift_count():
    # merging the pair would trade two mults for a new shift; sigma may
    # never grow under fold, so the chain stays as built
    folded = fold(_chain(math.sqrt(2.0), math.sqrt(2.0)))
    assert folded.count_ops() == OpCount(2, 0, 0)
    assert abs(folded.to_matrix()[0, 0] - 2.0) < 1e-15


def test_mult_chain_merges_to_one():
    folded = fold(_chain(0.7, 0.3))
    assert folded.count_ops() == OpCount(1, 0, 0)
    assert abs(folded.to_matrix()[0, 0] - 0.21) < 1e-15


def test_shift_chain_adds_exponents():
    folded = fold(_chain(4.0, 8.0))
    assert folded.count_ops() == OpCount(0, 0, 1)
    assert folded.to_matrix()[0, 0] == 32.0


def test_shared_inner_scale_not_duplicated():
    builder = PlanBuilder()
    x = builder.inputs(1)
    inner = builder.scale(x[0], 0.7)
    builder.output(builder.scale(inner, 2.0))
    builder.output(builder.scale(inner, 0.5))
    plan = builder.build()
    folded = fold(plan)
    # merging either chain would turn a cheap shift into a general mult
    assert folded.count_ops() == plan.count_ops() == OpCount(1, 0, 2)
    assert np.max(np.abs(folded.to_matrix() - plan.to_matrix())) == 0.0


def test_minus_one_absorbed_into_add():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(x[0], builder.negate(x[1])))
    plan = builder.build()
    folded = fold(plan)
    assert folded.count_ops() == OpCount(0, 1, 0)
    assert len(folded.nodes) < len(plan.nodes)
    assert np.array_equal(folded.to_matrix(), np.array([[1.0, -1.0]]))


def test_minus_one_absorbed_into_scale():
    builder = PlanBuilder()
    x = builder.inputs(1)
    builder.output(builder.scale(builder.negate(x[0]), -0.7))
    folded = fold(builder.build())
    assert folded.count_ops() == OpCount(1, 0, 0)
    assert abs(folded.to_matrix()[0, 0] - 0.7) < 1e-15


def test_push_across_add_factors_shared_constant():
    c = math.cos(math.pi / 5)
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(builder.scale(x[0], c), builder.scale(x[1], c)))
    folded = fold(builder.build())
    assert folded.count_ops() == OpCount(1, 1, 0)
    assert np.max(np.abs(folded.to_matrix() - np.array([[c, c]]))) < 1e-15


def test_push_handles_opposite_signs():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(builder.scale(x[0], 0.6), builder.scale(x[1], -0.6)))
    folded = fold(builder.build())
    assert folded.count_ops() == OpCount(1, 1, 0)
    assert np.max(np.abs(folded.to_matrix() - np.array([[0.6, -0.6]]))) < 1e-15


def test_push_blocked_when_it_would_add_shifts():
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(builder.scale(x[0], 0.6), builder.scale(x[1], 1.2)))
    plan = builder.build()
    # sharing 0.6 would leave a residual shift, trading mu for sigma
    assert fold(plan).count_ops() == plan.count_ops() == OpCount(2, 1, 0)


def test_push_blocked_on_fanout():
    builder = PlanBuilder()
    x = builder.inputs(2)
    sa = builder.scale(x[0], 0.7)
    sb = builder.scale(x[1], 0.7)
    builder.output(builder.add(sa, sb))
    builder.output(sa)
    plan = builder.build()
    folded = fold(plan)
    assert folded.count_ops() == OpCount(2, 1, 0)
    assert np.max(np.abs(folded.to_matrix() - plan.to_matrix())) == 0.0


def test_fold_reaches_published_counts():
    assert fold(merged_scaled_plan(6).plan).count_ops() == OpCount(1, 16, 2)
    assert fold(merged_scaled_plan(8).plan).count_ops() == OpCount(5, 29, 0)


def test_fold_is_idempotent():
    for n in (6, 8, 12):
        folded = fold(merged_scaled_plan(n).plan)
        assert fold(folded) == folded


def test_fold_preserves_matrix_and_never_raises_costs():
    plans = [kok_plan(8), kok_plan(12), merged_scaled_plan(8).plan, merged_scaled_plan(12).plan]
    for plan in plans:
        folded = fold(plan)
        assert np.max(np.abs(folded.to_matrix() - plan.to_matrix())) < 1e-12
        before, after = plan.count_ops(), folded.count_ops()
        assert after.mu <= before.mu
        assert after.sigma <= before.sigma
        assert after.alpha <= before.alpha
