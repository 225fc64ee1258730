"""Signal-flowgraph intermediate representation.

A plan is a flat, topologically ordered tuple of nodes: ``Input`` taps,
two-operand ``Add`` nodes (the second operand carries a sign), ``Scale``
nodes multiplying one wire by a constant, and ``Output`` taps.  Node
references are integer positions into the tuple and always point backward,
which makes every plan acyclic by construction and lets evaluation be a
single forward sweep.

Operation counting follows the usual flowgraph convention:

* every ``Add`` costs one addition (alpha), subtractions included;
* a ``Scale`` costs one multiplication (mu) unless its constant is a
  signed power of two, in which case it costs one shift (sigma), or a
  unit ``+-1``, in which case it is free;
* wiring (inputs, outputs, permutations, sign flips) is free.

Constants are kept in sign/exponent/mantissa form so products of scales
stay exact in the dyadic part: folding 2 * (1/2) or sqrt(2) * sqrt(2)
yields a unit or a pure shift with no floating-point residue.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

_MANTISSA_TOL = 1e-12


@dataclass(frozen=True)
class ExactConstant:
    """A nonzero real in the form sign * mantissa * 2**exponent.

    ``sign`` is +1 or -1, ``mantissa`` lies in [1, 2), and the dyadic part
    is exact: multiplying two constants multiplies mantissas and adds
    exponents, snapping mantissas within 1e-12 of a power of two onto it.
    """

    sign: int
    exponent: int
    mantissa: float

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if not 1.0 <= self.mantissa < 2.0:
            raise ValueError(f"mantissa must lie in [1, 2), got {self.mantissa}")

    @staticmethod
    def from_value(value: float) -> "ExactConstant":
        value = float(value)
        if value == 0.0 or not math.isfinite(value):
            raise ValueError(f"scale constant must be finite and nonzero, got {value}")
        sign = 1 if value > 0 else -1
        frac, exp = math.frexp(abs(value))  # frac in [0.5, 1)
        return _normalized(sign, exp - 1, 2.0 * frac)

    def __mul__(self, other: "ExactConstant") -> "ExactConstant":
        if not isinstance(other, ExactConstant):
            return NotImplemented
        return _normalized(
            self.sign * other.sign,
            self.exponent + other.exponent,
            self.mantissa * other.mantissa,
        )

    def value(self) -> float:
        return math.ldexp(self.sign * self.mantissa, self.exponent)

    @property
    def is_unit_magnitude(self) -> bool:
        return self.mantissa == 1.0

    @property
    def kind(self) -> str:
        """"free" for +-1, "shift" for other signed powers of two, else "mult"."""
        if self.mantissa == 1.0:
            return "free" if self.exponent == 0 else "shift"
        return "mult"

    def to_dict(self) -> dict:
        return {"sign": self.sign, "k": self.exponent, "mantissa": self.mantissa}

    @staticmethod
    def from_dict(d: dict) -> "ExactConstant":
        return ExactConstant(int(d["sign"]), int(d["k"]), float(d["mantissa"]))


def _normalized(sign: int, exponent: int, mantissa: float) -> ExactConstant:
    while mantissa >= 2.0 - _MANTISSA_TOL:
        mantissa /= 2.0
        exponent += 1
    while mantissa < 1.0 - _MANTISSA_TOL:
        mantissa *= 2.0
        exponent -= 1
    if abs(mantissa - 1.0) < _MANTISSA_TOL:
        mantissa = 1.0
    return ExactConstant(sign, exponent, mantissa)


ONE = ExactConstant(1, 0, 1.0)
MINUS_ONE = ExactConstant(-1, 0, 1.0)


@dataclass(frozen=True)
class OpCount:
    """Multiplications, additions, shifts."""

    mu: int
    alpha: int
    sigma: int

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.mu + other.mu, self.alpha + other.alpha, self.sigma + other.sigma)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.mu, self.alpha, self.sigma)


@dataclass(frozen=True)
class Input:
    index: int


@dataclass(frozen=True)
class Add:
    a: int
    b: int
    sign_b: int = 1


@dataclass(frozen=True)
class Scale:
    src: int
    constant: ExactConstant


@dataclass(frozen=True)
class Output:
    index: int
    src: int


Node = Union[Input, Add, Scale, Output]


def _node_refs(node: Node) -> tuple[int, ...]:
    if isinstance(node, Add):
        return (node.a, node.b)
    if isinstance(node, Scale):
        return (node.src,)
    if isinstance(node, Output):
        return (node.src,)
    return ()


@dataclass(frozen=True)
class PlanGraph:
    """Validated, immutable flowgraph."""

    n_inputs: int
    n_outputs: int
    nodes: tuple[Node, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.n_inputs < 1 or self.n_outputs < 1:
            raise ValueError("plan needs at least one input and one output")
        seen_inputs: set[int] = set()
        seen_outputs: set[int] = set()
        for pos, node in enumerate(self.nodes):
            for ref in _node_refs(node):
                if not 0 <= ref < pos:
                    raise ValueError(f"node {pos} references {ref}, which is not earlier in the plan")
                if isinstance(self.nodes[ref], Output):
                    raise ValueError(f"node {pos} reads from output node {ref}")
            if isinstance(node, Input):
                if node.index in seen_inputs or not 0 <= node.index < self.n_inputs:
                    raise ValueError(f"bad input index {node.index} at node {pos}")
                seen_inputs.add(node.index)
            elif isinstance(node, Output):
                if node.index in seen_outputs or not 0 <= node.index < self.n_outputs:
                    raise ValueError(f"bad output index {node.index} at node {pos}")
                seen_outputs.add(node.index)
            elif isinstance(node, Add):
                if node.sign_b not in (1, -1):
                    raise ValueError(f"sign_b must be +1 or -1 at node {pos}")
            elif not isinstance(node, Scale):
                raise TypeError(f"unknown node type at {pos}: {node!r}")
        if len(seen_inputs) != self.n_inputs:
            raise ValueError(f"plan declares {self.n_inputs} inputs but defines {len(seen_inputs)}")
        if len(seen_outputs) != self.n_outputs:
            raise ValueError(f"plan declares {self.n_outputs} outputs but defines {len(seen_outputs)}")

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Run the plan over the last axis of ``x`` (batch dimensions allowed)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_inputs:
            raise ValueError(f"expected last axis of length {self.n_inputs}, got {x.shape[-1]}")
        vals: list = [None] * len(self.nodes)
        out = np.empty(x.shape[:-1] + (self.n_outputs,))
        for pos, node in enumerate(self.nodes):
            if isinstance(node, Input):
                vals[pos] = x[..., node.index]
            elif isinstance(node, Add):
                if node.sign_b == 1:
                    vals[pos] = vals[node.a] + vals[node.b]
                else:
                    vals[pos] = vals[node.a] - vals[node.b]
            elif isinstance(node, Scale):
                vals[pos] = vals[node.src] * node.constant.value()
            else:
                out[..., node.index] = vals[node.src]
        return out

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        """Run the plan on a single vector."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError(f"evaluate expects a 1-D vector, got shape {x.shape}")
        if len(x) != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} samples, got {len(x)}")
        if np.any(~np.isfinite(x)):
            raise ValueError("input contains non-finite values")
        return self.apply(x)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix M with M @ x == apply(x), shape (n_outputs, n_inputs)."""
        return self.apply(np.eye(self.n_inputs)).T

    def count_ops(self) -> OpCount:
        mu = alpha = sigma = 0
        for node in self.nodes:
            if isinstance(node, Add):
                alpha += 1
            elif isinstance(node, Scale):
                kind = node.constant.kind
                if kind == "mult":
                    mu += 1
                elif kind == "shift":
                    sigma += 1
        return OpCount(mu, alpha, sigma)


def count_ops(plan: PlanGraph) -> OpCount:
    return plan.count_ops()


class PlanBuilder:
    """Incremental constructor returning node references as plain ints."""

    def __init__(self) -> None:
        self._nodes: list[Node] = []
        self._n_inputs = 0
        self._n_outputs = 0

    def _append(self, node: Node) -> int:
        self._nodes.append(node)
        return len(self._nodes) - 1

    def inputs(self, n: int) -> list[int]:
        refs = []
        for _ in range(n):
            refs.append(self._append(Input(self._n_inputs)))
            self._n_inputs += 1
        return refs

    def add(self, a: int, b: int) -> int:
        return self._append(Add(a, b, 1))

    def sub(self, a: int, b: int) -> int:
        return self._append(Add(a, b, -1))

    def scale(self, src: int, constant: Union[float, ExactConstant]) -> int:
        if not isinstance(constant, ExactConstant):
            constant = ExactConstant.from_value(constant)
        return self._append(Scale(src, constant))

    def negate(self, src: int) -> int:
        return self._append(Scale(src, MINUS_ONE))

    def output(self, src: int) -> int:
        ref = self._append(Output(self._n_outputs, src))
        self._n_outputs += 1
        return ref

    def outputs(self, srcs: Iterable[int]) -> None:
        for src in srcs:
            self.output(src)

    def splice(self, plan: PlanGraph, ins: Sequence[int]) -> list[int]:
        """Inline another plan's arithmetic, feeding its inputs from ``ins``.

        Returns the references that carried the inlined plan's outputs;
        no Output nodes are created.
        """
        if len(ins) != plan.n_inputs:
            raise ValueError(f"plan takes {plan.n_inputs} inputs, got {len(ins)}")
        mapping: dict[int, int] = {}
        outs: list[int] = [-1] * plan.n_outputs
        for pos, node in enumerate(plan.nodes):
            if isinstance(node, Input):
                mapping[pos] = ins[node.index]
            elif isinstance(node, Add):
                mapping[pos] = self._append(Add(mapping[node.a], mapping[node.b], node.sign_b))
            elif isinstance(node, Scale):
                mapping[pos] = self._append(Scale(mapping[node.src], node.constant))
            else:
                outs[node.index] = mapping[node.src]
        return outs

    def build(self) -> PlanGraph:
        return PlanGraph(self._n_inputs, self._n_outputs, tuple(self._nodes))


def prune(plan: PlanGraph) -> PlanGraph:
    """Drop arithmetic nodes that no output depends on.  Inputs are kept."""
    live = [False] * len(plan.nodes)
    for pos, node in enumerate(plan.nodes):
        if isinstance(node, (Input, Output)):
            live[pos] = True
    for pos in range(len(plan.nodes) - 1, -1, -1):
        if live[pos]:
            for ref in _node_refs(plan.nodes[pos]):
                live[ref] = True
    remap: dict[int, int] = {}
    nodes: list[Node] = []
    for pos, node in enumerate(plan.nodes):
        if not live[pos]:
            continue
        if isinstance(node, Add):
            node = Add(remap[node.a], remap[node.b], node.sign_b)
        elif isinstance(node, Scale):
            node = Scale(remap[node.src], node.constant)
        elif isinstance(node, Output):
            node = Output(node.index, remap[node.src])
        remap[pos] = len(nodes)
        nodes.append(node)
    return PlanGraph(plan.n_inputs, plan.n_outputs, tuple(nodes))


def transpose(plan: PlanGraph) -> PlanGraph:
    """Transposed plan: to_matrix(transpose(p)) == to_matrix(p).T.

    Classic flowgraph reversal: adjoints flow from outputs back to inputs,
    fan-out points become adders, adders become fan-out, scales keep their
    constants.  Multiplication and shift counts are preserved exactly.
    """
    plan = prune(plan)
    builder = PlanBuilder()
    adjoint_inputs = builder.inputs(plan.n_outputs)
    # contributions[pos] collects (ref, sign) terms of the adjoint of node pos
    contributions: list[list[tuple[int, int]]] = [[] for _ in plan.nodes]

    def materialize(terms: list[tuple[int, int]]) -> int:
        ref, sign = terms[0]
        for nxt_ref, nxt_sign in terms[1:]:
            # with sign == -1 the accumulator stands for the negated sum,
            # so the incoming term enters with its sign flipped
            ref = builder._append(Add(ref, nxt_ref, nxt_sign * sign))
        if sign == -1:
            ref = builder.negate(ref)
        return ref

    out_refs: list[tuple[int, int]] = []
    for pos in range(len(plan.nodes) - 1, -1, -1):
        node = plan.nodes[pos]
        if isinstance(node, Output):
            contributions[node.src].append((adjoint_inputs[node.index], 1))
            continue
        terms = contributions[pos]
        if not terms:
            if isinstance(node, Input):
                raise ValueError(f"input {node.index} is unused; its transpose has no source")
            continue  # dead arithmetic, already unreachable after prune
        if isinstance(node, Input):
            out_refs.append((node.index, materialize(terms)))
        elif isinstance(node, Scale):
            adj = materialize(terms)
            contributions[node.src].append((builder._append(Scale(adj, node.constant)), 1))
        else:
            adj = materialize(terms)
            contributions[node.a].append((adj, 1))
            contributions[node.b].append((adj, node.sign_b))
    for _, src in sorted(out_refs):
        builder.output(src)
    return builder.build()


def plan_to_dict(plan: PlanGraph) -> dict:
    nodes = []
    for node in plan.nodes:
        if isinstance(node, Input):
            nodes.append({"op": "input", "index": node.index})
        elif isinstance(node, Add):
            nodes.append({"op": "add", "a": node.a, "b": node.b, "sign_b": node.sign_b})
        elif isinstance(node, Scale):
            nodes.append({"op": "scale", "src": node.src, "constant": node.constant.to_dict()})
        else:
            nodes.append({"op": "output", "index": node.index, "src": node.src})
    return {"n_inputs": plan.n_inputs, "n_outputs": plan.n_outputs, "nodes": nodes}


def plan_from_dict(d: dict) -> PlanGraph:
    nodes: list[Node] = []
    for item in d["nodes"]:
        op = item["op"]
        if op == "input":
            nodes.append(Input(int(item["index"])))
        elif op == "add":
            nodes.append(Add(int(item["a"]), int(item["b"]), int(item.get("sign_b", 1))))
        elif op == "scale":
            nodes.append(Scale(int(item["src"]), ExactConstant.from_dict(item["constant"])))
        elif op == "output":
            nodes.append(Output(int(item["index"]), int(item["src"])))
        else:
            raise ValueError(f"unknown node op {op!r}")
    return PlanGraph(int(d["n_inputs"]), int(d["n_outputs"]), tuple(nodes))


def save_plan(plan: PlanGraph, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(plan_to_dict(plan), fh, indent=2)
        fh.write("\n")


def load_plan(path: str) -> PlanGraph:
    with open(path) as fh:
        return plan_from_dict(json.load(fh))


def to_dot(plan: PlanGraph) -> str:
    """Graphviz rendering; negative-signed edges are dashed."""
    lines = ["digraph plan {", "  rankdir=LR;"]
    for pos, node in enumerate(plan.nodes):
        if isinstance(node, Input):
            lines.append(f'  n{pos} [label="in{node.index}" shape=box];')
        elif isinstance(node, Add):
            lines.append(f'  n{pos} [label="+" shape=circle];')
        elif isinstance(node, Scale):
            lines.append(f'  n{pos} [label="*{node.constant.value():.6g}" shape=circle];')
        else:
            lines.append(f'  n{pos} [label="out{node.index}" shape=box];')
    for pos, node in enumerate(plan.nodes):
        if isinstance(node, Add):
            lines.append(f"  n{node.a} -> n{pos};")
            style = " [style=dashed]" if node.sign_b < 0 else ""
            lines.append(f"  n{node.b} -> n{pos}{style};")
        elif isinstance(node, Scale):
            style = " [style=dashed]" if node.constant.sign < 0 else ""
            lines.append(f"  n{node.src} -> n{pos}{style};")
        elif isinstance(node, Output):
            lines.append(f"  n{node.src} -> n{pos};")
    lines.append("}")
    return "\n".join(lines) + "\n"
