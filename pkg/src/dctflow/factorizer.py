"""Plan constructors for DCT-II and DCT-III of lengths N = q * 2^m.

Three constructions live here:

* ``kok_plan``: the radix-2 split of the DCT-II.  The butterfly stage
  pairs x_i with x_{N-1-i}; the top half feeds a recursive half-length
  DCT-II; the bottom half (reversed, i.e. x_i - x_{N-1-i}) is scaled by
  the quarter-wave cosines, runs through another half-length DCT-II, and
  finishes with the recursive-subtraction ladder that turns a DCT-II into
  a DCT-IV.  Outputs interleave even/odd.

* ``scaled_plan``: the same split for the scaled transform C2 = Pi *
  diag(delta) * C~.  The bottom branch becomes a transposed ladder
  followed by a DCT-III (realized as the transpose of ``kok_plan``),
  and the quarter-wave cosines move into ``delta`` instead of costing
  multiplications.  Instrumented counts of this construction match the
  base-parametric closed forms exactly.

* ``merged_scaled_plan``: an algebraically rearranged variant of the
  scaled split for lengths 2^m and 3*2^m only.  The lower branch is
  rewritten as transpose(C~) of the half length with explicit
  scale-then-double chains on its input wires and the leftover halving
  absorbed into ``delta``; after ``fold`` merges those chains the plan
  reaches the published minimal counts, which the plain recursion
  provably cannot reach by folding alone (its lower branch keeps a
  structural 1/2 on a path whose other coefficients are irrational).

Odd lengths come from a ``BaseLibrary``: 2- and 3-point plans are built
in, anything else odd falls back to dense row evaluation, and custom
plans can be registered from files (checked against the oracle on load).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .flowgraph import (
    ExactConstant,
    Output,
    PlanBuilder,
    PlanGraph,
    Scale,
    _node_refs,
    load_plan,
    plan_from_dict,
    prune,
    transpose,
)
from .oracle import dct2_matrix

_ZERO_TOL = 1e-12
_BASE_TOL = 1e-10


def _check_length(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"length must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")


@dataclass(frozen=True)
class ScaledFactorization:
    """Plan for the scaled transform plus its reordering and scale diagonal.

    The defining identity is C2 = Pi * diag(delta) * to_matrix(plan) where
    Pi has its 1 in column pi[i] of row i, so natural-order output i is
    delta[pi[i]] times plan output pi[i].
    """

    plan: PlanGraph
    pi: tuple[int, ...]
    delta: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pi", tuple(int(i) for i in self.pi))
        object.__setattr__(self, "delta", tuple(float(d) for d in self.delta))
        n = self.plan.n_outputs
        if self.plan.n_inputs != n:
            raise ValueError("scaled factorization requires a square plan")
        if len(self.pi) != n or len(self.delta) != n:
            raise ValueError(f"pi and delta must have length {n}")
        if sorted(self.pi) != list(range(n)):
            raise ValueError("pi is not a permutation")
        if not all(math.isfinite(d) and d > 0 for d in self.delta):
            raise ValueError("delta entries must be positive and finite")

    @property
    def n(self) -> int:
        return self.plan.n_outputs

    def reconstruction_matrix(self) -> np.ndarray:
        """Dense Pi * diag(delta) * to_matrix(plan); equals the DCT-II matrix."""
        m = self.plan.to_matrix()
        perm = np.asarray(self.pi)
        d = np.asarray(self.delta)
        return d[perm][:, None] * m[perm, :]

    def reconstruct(self, y: np.ndarray) -> np.ndarray:
        """Map raw plan outputs to natural-order DCT-II outputs."""
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.n:
            raise ValueError(f"expected last axis of length {self.n}, got {y.shape[-1]}")
        perm = np.asarray(self.pi)
        d = np.asarray(self.delta)
        return y[..., perm] * d[perm]


def identity_plan(n: int) -> PlanGraph:
    _check_length(n)
    builder = PlanBuilder()
    builder.outputs(builder.inputs(n))
    return builder.build()


def base_plan_2() -> PlanGraph:
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(x[0], x[1]))
    builder.output(builder.scale(builder.sub(x[0], x[1]), math.cos(math.pi / 4)))
    return builder.build()


def base_scaled_2() -> ScaledFactorization:
    # DC path carries the sqrt(2) as an explicit Scale so the fold of the
    # surrounding recursion can merge it; both outputs are 1/sqrt(2)-scaled.
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.scale(builder.add(x[0], x[1]), math.sqrt(2.0)))
    builder.output(builder.sub(x[0], x[1]))
    half_sqrt2 = math.sqrt(0.5)
    return ScaledFactorization(builder.build(), (0, 1), (half_sqrt2, half_sqrt2))


def base_plan_3() -> PlanGraph:
    builder = PlanBuilder()
    x = builder.inputs(3)
    s = builder.add(x[0], x[2])
    builder.output(builder.add(s, x[1]))
    builder.output(builder.scale(builder.sub(x[0], x[2]), math.cos(math.pi / 6)))
    builder.output(builder.sub(builder.scale(s, 0.5), x[1]))
    return builder.build()


def base_scaled_3() -> ScaledFactorization:
    # Computes (2 2 2; 2cos(pi/6) 0 -2cos(pi/6); 1 -2 1) with both factor-2
    # scales left explicit for downstream cancellation; delta is 1/2 each.
    builder = PlanBuilder()
    x = builder.inputs(3)
    s = builder.add(x[0], x[2])
    builder.output(builder.scale(builder.add(s, x[1]), 2.0))
    builder.output(builder.scale(builder.sub(x[0], x[2]), 2.0 * math.cos(math.pi / 6)))
    builder.output(builder.sub(s, builder.scale(x[1], 2.0)))
    return ScaledFactorization(builder.build(), (0, 1, 2), (0.5, 0.5, 0.5))


def dense_base_plan(q: int) -> PlanGraph:
    """Direct row-by-row evaluation of the length-q DCT-II (q odd).

    Costs are whatever the matrix entries dictate: entries that are
    signed units are free, signed powers of two are shifts, the rest are
    multiplications.  Used as the fallback base for odd q with no stored
    factorization.
    """
    _check_length(q)
    if q % 2 == 0:
        raise ValueError(f"dense base requires an odd length, got {q}")
    matrix = dct2_matrix(q)
    builder = PlanBuilder()
    x = builder.inputs(q)
    for row in matrix:
        terms = [
            (col, ExactConstant.from_value(entry))
            for col, entry in enumerate(row)
            if abs(entry) >= _ZERO_TOL
        ]
        first_col, first_c = terms[0]
        if first_c.kind == "free" and first_c.sign == 1:
            acc = x[first_col]
        else:
            acc = builder.scale(x[first_col], first_c)
        for col, c in terms[1:]:
            if c.kind == "free":
                ref = x[col]
            else:
                ref = builder.scale(x[col], ExactConstant(1, c.exponent, c.mantissa))
            acc = builder.add(acc, ref) if c.sign == 1 else builder.sub(acc, ref)
        builder.output(acc)
    return builder.build()


class BaseLibrary:
    """Odd-length base transforms, plus the 2-point bottom of the recursion.

    Unregistered lengths fall back to the built-ins (1, 2, 3) or to
    ``dense_base_plan``.  Registered plans are checked against the dense
    transform matrix at registration time, so a library can never hand
    the recursion a wrong base.
    """

    def __init__(self) -> None:
        self._plans: dict[int, PlanGraph] = {}
        self._scaled: dict[int, ScaledFactorization] = {}

    def registered(self) -> tuple[int, ...]:
        """Lengths with an explicitly registered plan or scaled base."""
        return tuple(sorted(set(self._plans) | set(self._scaled)))

    @staticmethod
    def _check_base_length(q: int) -> None:
        _check_length(q)
        if q != 2 and q % 2 == 0:
            raise ValueError(f"base length must be odd or 2, got {q}")

    def register(self, q: int, plan: PlanGraph, source: str | None = None) -> None:
        self._check_base_length(q)
        origin = f" from {source}" if source else ""
        if plan.n_inputs != q or plan.n_outputs != q:
            raise ValueError(f"base plan{origin} is {plan.n_inputs}x{plan.n_outputs}, expected {q}x{q}")
        err = float(np.max(np.abs(plan.to_matrix() - dct2_matrix(q))))
        if not err < _BASE_TOL:
            raise ValueError(f"base plan for q={q}{origin} deviates from the transform matrix by {err:.3e}")
        self._plans[q] = plan

    def register_scaled(self, q: int, factorization: ScaledFactorization, source: str | None = None) -> None:
        self._check_base_length(q)
        origin = f" from {source}" if source else ""
        if factorization.n != q:
            raise ValueError(f"scaled base{origin} has length {factorization.n}, expected {q}")
        err = float(np.max(np.abs(factorization.reconstruction_matrix() - dct2_matrix(q))))
        if not err < _BASE_TOL:
            raise ValueError(f"scaled base for q={q}{origin} deviates from the transform matrix by {err:.3e}")
        self._scaled[q] = factorization

    def register_plan_file(self, q: int, path: str) -> None:
        try:
            plan = load_plan(path)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"cannot load base plan from {path}: {exc}") from exc
        self.register(q, plan, source=str(path))

    def register_scaled_file(self, q: int, path: str) -> None:
        try:
            with open(path) as fh:
                payload = json.load(fh)
            factorization = ScaledFactorization(
                plan_from_dict(payload["plan"]),
                tuple(payload["pi"]),
                tuple(payload["delta"]),
            )
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"cannot load scaled base from {path}: {exc}") from exc
        self.register_scaled(q, factorization, source=str(path))

    def plan_for(self, q: int) -> PlanGraph:
        self._check_base_length(q)
        if q in self._plans:
            return self._plans[q]
        if q == 1:
            return identity_plan(1)
        if q == 2:
            return base_plan_2()
        if q == 3:
            return base_plan_3()
        return dense_base_plan(q)

    def scaled_for(self, q: int) -> ScaledFactorization:
        self._check_base_length(q)
        if q in self._scaled:
            return self._scaled[q]
        if q == 2:
            return base_scaled_2()
        if q == 3:
            return base_scaled_3()
        plan = self.plan_for(q)
        return ScaledFactorization(plan, tuple(range(q)), (1.0,) * q)


_DEFAULT_LIBRARY = BaseLibrary()


def _quarter_wave(k: int, n: int) -> float:
    # entry k of D_{n/2} in a length-n split: 2cos((2k+1)pi / 2n)
    return 2.0 * math.cos(math.pi * (2 * k + 1) / (2 * n))


def kok_plan(n: int, bases: BaseLibrary | None = None) -> PlanGraph:
    """DCT-II plan for any length n >= 1 via the radix-2 split."""
    _check_length(n)
    bases = _DEFAULT_LIBRARY if bases is None else bases
    if n <= 2 or n % 2 == 1:
        return bases.plan_for(n)
    h = n // 2
    builder = PlanBuilder()
    x = builder.inputs(n)
    tops = [builder.add(x[i], x[n - 1 - i]) for i in range(h)]
    bots = [builder.sub(x[i], x[n - 1 - i]) for i in range(h)]
    half = kok_plan(h, bases)
    upper = builder.splice(half, tops)
    scaled = [builder.scale(bots[k], _quarter_wave(k, n)) for k in range(h)]
    core = builder.splice(half, scaled)
    ladder = [0] * h
    ladder[0] = builder.scale(core[0], 0.5)
    for i in range(1, h):
        ladder[i] = builder.sub(core[i], ladder[i - 1])
    for i in range(h):
        builder.output(upper[i])
        builder.output(ladder[i])
    return builder.build()


def dct3_plan(n: int, bases: BaseLibrary | None = None) -> PlanGraph:
    """DCT-III plan: the transposed DCT-II flowgraph (same operation counts)."""
    return transpose(kok_plan(n, bases))


def scaled_plan(n: int, bases: BaseLibrary | None = None) -> ScaledFactorization:
    """Scaled DCT-II factorization via the plain recursive split."""
    _check_length(n)
    bases = _DEFAULT_LIBRARY if bases is None else bases
    if n <= 3 or n % 2 == 1:
        return bases.scaled_for(n)
    h = n // 2
    half = scaled_plan(h, bases)
    lower_block = transpose(kok_plan(h, bases))
    builder = PlanBuilder()
    x = builder.inputs(n)
    tops = [builder.add(x[i], x[n - 1 - i]) for i in range(h)]
    w = [builder.sub(x[i], x[n - 1 - i]) for i in range(h)]
    upper = builder.splice(half.plan, tops)
    # transposed recursive-subtraction ladder; the head carries the 1/2
    t = [0] * h
    t[h - 1] = w[h - 1]
    for j in range(h - 2, 0, -1):
        t[j] = builder.sub(w[j], t[j + 1])
    t[0] = builder.scale(builder.sub(w[0], t[1]), 0.5)
    lower = builder.splice(lower_block, t)
    builder.outputs(upper + lower)
    pi = [0] * n
    for i in range(h):
        pi[2 * i] = half.pi[i]
        pi[2 * i + 1] = h + i
    delta = tuple(half.delta) + tuple(_quarter_wave(k, n) for k in range(h))
    return ScaledFactorization(builder.build(), tuple(pi), delta)


def _merged_base_2() -> ScaledFactorization:
    builder = PlanBuilder()
    x = builder.inputs(2)
    builder.output(builder.add(x[0], x[1]))
    builder.output(builder.sub(x[0], x[1]))
    return ScaledFactorization(builder.build(), (0, 1), (1.0, math.cos(math.pi / 4)))


def _merged_base_3() -> ScaledFactorization:
    # computes (1 1 1; 1 0 -1; 1 -2 1); delta restores the cosine rows
    builder = PlanBuilder()
    x = builder.inputs(3)
    s = builder.add(x[0], x[2])
    builder.output(builder.add(s, x[1]))
    builder.output(builder.sub(x[0], x[2]))
    builder.output(builder.sub(s, builder.scale(x[1], 2.0)))
    return ScaledFactorization(builder.build(), (0, 1, 2), (1.0, math.cos(math.pi / 6), 0.5))


def merged_scaled_plan(n: int) -> ScaledFactorization:
    """Scaled DCT-II with the lower branch rewritten for full cancellation.

    Supported for n in the families 2^m (m >= 1) and 3*2^m (m >= 0).  The
    lower branch applies the integer subtraction ladder, then per-wire
    scale-then-double chains, then the transposed scaled plan of the half
    length; the halving that the plain recursion keeps on the head wire is
    pulled through the block and absorbed into delta, whose lower half
    becomes cos((2k+1)pi/2n) instead of twice that.  ``fold`` then merges
    every chain, which is what reaches the published operation counts.
    """
    _check_length(n)
    q, m = n, 0
    while q % 2 == 0:
        q //= 2
        m += 1
    if not (q == 3 or (q == 1 and m >= 1)):
        raise ValueError(
            f"length {n} is outside the merged scaled families 2^m (m >= 1) and 3*2^m (m >= 0)"
        )
    if n == 2:
        return _merged_base_2()
    if n == 3:
        return _merged_base_3()
    h = n // 2
    half = merged_scaled_plan(h)
    if half.delta[0] != 1.0:
        raise RuntimeError("merged recursion requires a unit DC scale in the half-length delta")
    lower_block = transpose(half.plan)
    builder = PlanBuilder()
    x = builder.inputs(n)
    tops = [builder.add(x[i], x[n - 1 - i]) for i in range(h)]
    w = [builder.sub(x[i], x[n - 1 - i]) for i in range(h)]
    upper = builder.splice(half.plan, tops)
    # integer ladder: no halving anywhere, the head's 1/2 lives in delta now
    t = [0] * h
    t[h - 1] = w[h - 1]
    for j in range(h - 2, -1, -1):
        t[j] = builder.sub(w[j], t[j + 1])
    pi_inv = [0] * h
    for i, j in enumerate(half.pi):
        pi_inv[j] = i
    feeds = []
    for j in range(h):
        src = t[pi_inv[j]]
        if j == 0:
            feeds.append(src)
        else:
            feeds.append(builder.scale(builder.scale(src, half.delta[j]), 2.0))
    lower = builder.splice(lower_block, feeds)
    builder.outputs(upper + lower)
    pi = [0] * n
    for i in range(h):
        pi[2 * i] = half.pi[i]
        pi[2 * i + 1] = h + i
    delta = tuple(half.delta) + tuple(math.cos(math.pi * (2 * k + 1) / (2 * n)) for k in range(h))
    return ScaledFactorization(builder.build(), tuple(pi), delta)


def dct3_plan_via_scaled(n: int, bases: BaseLibrary | None = None) -> PlanGraph:
    """DCT-III as transpose(C~) * diag(delta) * Pi^T over the scaled plan."""
    factorization = scaled_plan(n, bases)
    size = factorization.n
    pi_inv = [0] * size
    for i, j in enumerate(factorization.pi):
        pi_inv[j] = i
    builder = PlanBuilder()
    y = builder.inputs(size)
    wires = [builder.scale(y[pi_inv[j]], factorization.delta[j]) for j in range(size)]
    builder.outputs(builder.splice(transpose(factorization.plan), wires))
    return builder.build()


def absorb_output_scales(factorization: ScaledFactorization) -> ScaledFactorization:
    """Move positive Scales that feed only an output into delta.

    This is the local counterpart of the global fold: the base scaled
    plans keep their sqrt(2)/2 factors explicit for merging, and this
    helper realizes the merge when the plan is used standalone.
    """
    nodes = list(factorization.plan.nodes)
    delta = list(factorization.delta)
    while True:
        fanout = [0] * len(nodes)
        for node in nodes:
            for ref in _node_refs(node):
                fanout[ref] += 1
        changed = False
        for pos, node in enumerate(nodes):
            if not isinstance(node, Output):
                continue
            feeder = nodes[node.src]
            if isinstance(feeder, Scale) and fanout[node.src] == 1 and feeder.constant.sign == 1:
                delta[node.index] *= feeder.constant.value()
                nodes[pos] = Output(node.index, feeder.src)
                changed = True
        if not changed:
            break
    plan = prune(PlanGraph(factorization.plan.n_inputs, factorization.plan.n_outputs, tuple(nodes)))
    return ScaledFactorization(plan, factorization.pi, tuple(delta))
