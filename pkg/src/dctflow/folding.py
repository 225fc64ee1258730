"""Constant-folding pass over flowgraph plans.

Three rewrites run to a fixed point in a deterministic order:

1. merge chains: Scale(Scale(x, c1), c2) becomes Scale(x, c1*c2) with the
   product taken in ExactConstant form, so dyadic parts cancel exactly;
2. drop units: Scale by +1 disappears, Scale by -1 is absorbed into the
   sign slot of downstream Adds or the constant of downstream Scales;
3. push across adds: Add(Scale(x, c_a), Scale(y, c_b)) with matching
   mantissas factors the shared constant out past the Add, leaving at
   most residual shifts inside.

Every rewrite is gated so the (mu, sigma) cost vector never increases
componentwise and alpha never increases; dead nodes are pruned between
sweeps.  The gate is what blocks trades like two multiplications for one
shift, keeping the folded counts comparable with the unfolded ones.
"""

from __future__ import annotations

from .flowgraph import (
    MINUS_ONE,
    Add,
    ExactConstant,
    Input,
    Node,
    Output,
    PlanGraph,
    Scale,
    _node_refs,
    prune,
)

_MANTISSA_TOL = 1e-12

_KIND_COST = {"free": (0, 0), "shift": (0, 1), "mult": (1, 0)}


def _cost(constant: ExactConstant) -> tuple[int, int]:
    return _KIND_COST[constant.kind]


def _cost_le(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _fanout(plan: PlanGraph) -> list[int]:
    counts = [0] * len(plan.nodes)
    for node in plan.nodes:
        for ref in _node_refs(node):
            counts[ref] += 1
    return counts


def _merge_chains(plan: PlanGraph) -> PlanGraph:
    # Replace the outer Scale of a Scale->Scale chain by one combined Scale.
    # Budget: if the inner scale has no other consumer it dies with the
    # merge, so its cost is available; otherwise only the outer's is.
    fanout = _fanout(plan)
    nodes = list(plan.nodes)
    changed = False
    for pos, node in enumerate(nodes):
        if not isinstance(node, Scale):
            continue
        inner = nodes[node.src]
        if not isinstance(inner, Scale):
            continue
        merged = inner.constant * node.constant
        if fanout[node.src] == 1:
            inner_cost, outer_cost = _cost(inner.constant), _cost(node.constant)
            budget = (inner_cost[0] + outer_cost[0], inner_cost[1] + outer_cost[1])
        else:
            budget = _cost(node.constant)
        if _cost_le(_cost(merged), budget):
            nodes[pos] = Scale(inner.src, merged)
            changed = True
    if not changed:
        return plan
    return PlanGraph(plan.n_inputs, plan.n_outputs, tuple(nodes))


def _drop_unit_scales(plan: PlanGraph) -> PlanGraph:
    nodes = list(plan.nodes)
    plus_alias: dict[int, int] = {}
    for pos, node in enumerate(nodes):
        if isinstance(node, Scale) and node.constant.kind == "free" and node.constant.sign == 1:
            plus_alias[pos] = node.src

    def resolve(ref: int) -> int:
        while ref in plus_alias:
            ref = plus_alias[ref]
        return ref

    def is_negation(ref: int) -> bool:
        node = nodes[ref]
        return isinstance(node, Scale) and node.constant == MINUS_ONE

    changed = False
    new_nodes: list[Node] = []
    for pos, node in enumerate(nodes):
        if isinstance(node, Add):
            a, b, sign_b = resolve(node.a), resolve(node.b), node.sign_b
            if is_negation(b):
                b, sign_b = resolve(nodes[b].src), -sign_b
            replacement: Node = Add(a, b, sign_b)
        elif isinstance(node, Scale):
            src, constant = resolve(node.src), node.constant
            if is_negation(src):
                src, constant = resolve(nodes[src].src), constant * MINUS_ONE
            replacement = Scale(src, constant)
        elif isinstance(node, Output):
            replacement = Output(node.index, resolve(node.src))
        else:
            replacement = node
        if replacement != node:
            changed = True
        new_nodes.append(replacement)
    if not changed:
        return plan
    return PlanGraph(plan.n_inputs, plan.n_outputs, tuple(new_nodes))


def _push_across_adds(plan: PlanGraph) -> PlanGraph:
    # Add(Scale(x, c_a), Scale(y, c_b)) with c_a, c_b sharing a mantissa
    # factors out Scale(Add(...), c) and leaves residual pure shifts.
    # Requires both scales single-consumer and a strict cost win.
    fanout = _fanout(plan)
    nodes = plan.nodes
    dirty: set[int] = set()
    remap: dict[int, int] = {}
    out: list[Node] = []
    changed = False

    def emit(node: Node) -> int:
        out.append(node)
        return len(out) - 1

    for pos, node in enumerate(nodes):
        if isinstance(node, Add):
            pa, pb = node.a, node.b
            na, nb = nodes[pa], nodes[pb]
            if (
                isinstance(na, Scale)
                and isinstance(nb, Scale)
                and pa != pb
                and fanout[pa] == 1
                and fanout[pb] == 1
                and pa not in dirty
                and pb not in dirty
                and abs(na.constant.mantissa - nb.constant.mantissa) < _MANTISSA_TOL
            ):
                ca, cb = na.constant, nb.constant
                k = min(ca.exponent, cb.exponent)
                shared = ExactConstant(ca.sign, k, ca.mantissa)
                res_a, res_b = ca.exponent - k, cb.exponent - k
                before = (_cost(ca)[0] + _cost(cb)[0], _cost(ca)[1] + _cost(cb)[1])
                after = list(_cost(shared))
                for res in (res_a, res_b):
                    if res:
                        after[1] += 1
                after_t = (after[0], after[1])
                if _cost_le(after_t, before) and after_t != before:
                    src_a, src_b = remap[na.src], remap[nb.src]
                    if res_a:
                        src_a = emit(Scale(src_a, ExactConstant(1, res_a, 1.0)))
                    if res_b:
                        src_b = emit(Scale(src_b, ExactConstant(1, res_b, 1.0)))
                    inner = emit(Add(src_a, src_b, node.sign_b * ca.sign * cb.sign))
                    remap[pos] = emit(Scale(inner, shared))
                    dirty.update((pa, pb, na.src, nb.src))
                    changed = True
                    continue
        if isinstance(node, Input):
            replacement: Node = node
        elif isinstance(node, Add):
            replacement = Add(remap[node.a], remap[node.b], node.sign_b)
        elif isinstance(node, Scale):
            replacement = Scale(remap[node.src], node.constant)
        else:
            replacement = Output(node.index, remap[node.src])
        remap[pos] = emit(replacement)
    if not changed:
        return plan
    return PlanGraph(plan.n_inputs, plan.n_outputs, tuple(out))


def fold(plan: PlanGraph, max_sweeps: int = 64) -> PlanGraph:
    """Matrix-preserving constant folding; see the module docstring."""
    current = prune(plan)
    for _ in range(max_sweeps):
        before = current.nodes
        current = _merge_chains(current)
        current = _drop_unit_scales(current)
        current = _push_across_adds(current)
        current = prune(current)
        if current.nodes == before:
            break
    return current
