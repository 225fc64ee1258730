"""Command-line front end.

Subcommands: gen (emit a plan as JSON or DOT), eval (run a plan on
random vectors against the dense transform), count (instrument a built
plan), formula (closed forms), table2 / fig5 (published-data CSVs), and
verify (the full identity and oracle-equivalence suite).

Exit codes: 0 success, 1 verification or data failure, 2 usage error.
All output goes to standard output, errors to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import complexity
from .factorizer import (
    BaseLibrary,
    ScaledFactorization,
    dct3_plan,
    kok_plan,
    merged_scaled_plan,
    scaled_plan,
)
from .flowgraph import OpCount, PlanGraph, plan_to_dict, to_dot
from .folding import fold
from .oracle import (
    b_matrix,
    d_matrix,
    dct2_matrix,
    dct3_matrix,
    dct4_matrix,
    j_matrix,
    p_matrix,
    r_matrix,
)

_DEFAULT_TOL = 1e-9
_CORPUS_ODD = (1, 3, 5, 15)


class UsageError(ValueError):
    """Bad arguments or argument combinations; maps to exit code 2."""


@dataclass(frozen=True)
class CliConfig:
    """Validated per-invocation settings shared by the subcommands."""

    subcommand: str
    n: int | None = None
    q: int | None = None
    m: int | None = None
    scaled: bool = False
    fold: bool = False
    fmt: str = "text"
    seed: int = 0
    tolerance: float = _DEFAULT_TOL

    def __post_init__(self) -> None:
        if not self.subcommand:
            raise UsageError("a subcommand is required")
        if self.n is not None and self.n < 1:
            raise UsageError(f"N must be positive, got {self.n}")
        if not 0.0 < self.tolerance <= 1e-3:
            raise UsageError(f"tolerance must be in (0, 1e-3], got {self.tolerance}")

    def length(self) -> int:
        if self.n is not None:
            return self.n
        if self.q is None or self.m is None:
            raise UsageError("provide --n, or both --q and --m")
        if self.q < 1 or self.q % 2 == 0:
            raise UsageError(f"q must be a positive odd integer, got {self.q}")
        if self.m < 0:
            raise UsageError(f"m must be nonnegative, got {self.m}")
        return self.q << self.m


def _fmt_counts(c: OpCount) -> str:
    return f"{c.mu},{c.alpha},{c.sigma}"


def _scaled_factorization(n: int, variant: str, bases: BaseLibrary | None = None) -> ScaledFactorization:
    if variant == "recursive":
        return scaled_plan(n, bases)
    if variant == "merged":
        return merged_scaled_plan(n)
    try:
        return merged_scaled_plan(n)
    except ValueError:
        return scaled_plan(n, bases)


def _build_plan(config: CliConfig, variant: str) -> tuple[str, PlanGraph, ScaledFactorization | None]:
    n = config.length()
    if config.scaled:
        factorization = _scaled_factorization(n, variant)
        plan = fold(factorization.plan) if config.fold else factorization.plan
        return "scaled-dct2", plan, factorization
    plan = kok_plan(n)
    if config.fold:
        plan = fold(plan)
    return "dct2", plan, None


def cmd_gen(config: CliConfig, args: argparse.Namespace) -> int:
    kind, plan, factorization = _build_plan(config, args.variant)
    if config.fmt == "dot":
        print(to_dot(plan))
        return 0
    counts = plan.count_ops()
    doc: dict = {
        "kind": kind,
        "n": config.length(),
        "folded": config.fold,
        "counts": {"mu": counts.mu, "alpha": counts.alpha, "sigma": counts.sigma},
    }
    if factorization is not None:
        doc["pi"] = list(factorization.pi)
        doc["delta"] = list(factorization.delta)
    doc["plan"] = plan_to_dict(plan)
    print(json.dumps(doc, indent=2))
    return 0


def cmd_eval(config: CliConfig, args: argparse.Namespace) -> int:
    n = config.length()
    kind, plan, factorization = _build_plan(config, args.variant)
    print(f"PRNG: PCG64 seed={config.seed}")
    rng = np.random.default_rng(config.seed)
    x = rng.uniform(-1.0, 1.0, size=(args.trials, n))
    got = plan.apply(x)
    if factorization is not None:
        got = factorization.reconstruct(got)
    expected = x @ dct2_matrix(n).T
    err = float(np.max(np.abs(got - expected)))
    print(f"plan: {kind} n={n} trials={args.trials} folded={config.fold}")
    print(f"max error: {err:.3e} (tolerance {config.tolerance:g})")
    if err < config.tolerance:
        return 0
    print(f"FAIL {kind} N={n}: error {err:.3e}", file=sys.stderr)
    return 1


def _formula_for_length(n: int, scaled: bool, folded: bool) -> OpCount:
    q, m = complexity.decompose(n)
    if q == 1:
        if m == 0:
            return OpCount(0, 0, 0)
        if scaled:
            return complexity.dyadic_family_scaled(m) if folded else complexity.scaled_counts(complexity.base_counts_for(2), m - 1)
        q, m = 2, m - 1
    try:
        base = complexity.base_counts_for(q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if scaled:
        return complexity.family_scaled_counts(q, m) if folded else complexity.scaled_counts(base, m)
    return complexity.kok_counts(base, m)


def _print_counts(config: CliConfig, counts: OpCount, compare_with: OpCount | None) -> None:
    if compare_with is not None:
        print(f"plan: {_fmt_counts(counts)}")
        print(f"formula: {_fmt_counts(compare_with)}")
        diff = (counts.mu - compare_with.mu, counts.alpha - compare_with.alpha, counts.sigma - compare_with.sigma)
        print(f"diff: {diff[0]},{diff[1]},{diff[2]}")
    elif config.fmt == "csv":
        print("mu,alpha,sigma")
        print(_fmt_counts(counts))
    else:
        print(_fmt_counts(counts))


def cmd_count(config: CliConfig, args: argparse.Namespace) -> int:
    _, plan, _ = _build_plan(config, args.variant)
    counts = plan.count_ops()
    compare_with = _formula_for_length(config.length(), config.scaled, config.fold) if args.compare else None
    _print_counts(config, counts, compare_with)
    return 0


def cmd_formula(config: CliConfig, args: argparse.Namespace) -> int:
    if config.q is None or config.m is None:
        raise UsageError("formula requires both --q and --m")
    try:
        base = complexity.base_counts_for(config.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    single: int | None = None
    try:
        if args.pfa_scaled:
            single = complexity.pfa_scaled_bound(base, config.m)
        elif args.pfa_lower:
            single = complexity.pfa_unscaled_lower_bound(base, config.m)
        elif args.savings:
            single = complexity.savings(base, config.m)
        elif config.scaled:
            counts = complexity.family_scaled_counts(config.q, config.m)
        else:
            counts = complexity.kok_counts(base, config.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if single is not None:
        if args.compare:
            raise UsageError("--compare applies to the count formulas, not the bounds")
        print(single)
        return 0
    compare_with = None
    if args.compare:
        counts, compare_with = _instrumented(config), counts
    _print_counts(config, counts, compare_with)
    return 0


def _instrumented(config: CliConfig) -> OpCount:
    n = config.length()
    if config.scaled:
        factorization = _scaled_factorization(n, "auto")
        return fold(factorization.plan).count_ops()
    return kok_plan(n).count_ops()


def cmd_table2(config: CliConfig, args: argparse.Namespace) -> int:
    sys.stdout.write(complexity.table2_csv())
    return 0


def cmd_fig5(config: CliConfig, args: argparse.Namespace) -> int:
    if args.max_m < 1:
        raise UsageError(f"--max-m must be at least 1, got {args.max_m}")
    sys.stdout.write(complexity.fig5_csv(args.max_m))
    return 0


def _corpus_lengths(limit: int, extra_odd: tuple[int, ...] = ()) -> list[int]:
    lengths = set()
    for q in set(_CORPUS_ODD) | set(extra_odd):
        n = q
        while n <= limit:
            lengths.add(n)
            n *= 2
    return sorted(lengths)


def _parse_base_args(pairs: list[str] | None, register) -> None:
    for pair in pairs or []:
        q_text, sep, path = pair.partition("=")
        if not sep or not path:
            raise UsageError(f"expected Q=PATH, got {pair!r}")
        try:
            q = int(q_text)
        except ValueError:
            raise UsageError(f"expected an integer length before '=', got {pair!r}") from None
        register(q, path)


def _split_identity(n: int) -> float:
    h = n // 2
    block = np.zeros((n, n))
    block[:h, :h] = dct2_matrix(h)
    block[h:, h:] = dct4_matrix(h) @ j_matrix(h)
    return float(np.max(np.abs(p_matrix(n) @ block @ b_matrix(n) - dct2_matrix(n))))


def cmd_verify(config: CliConfig, args: argparse.Namespace) -> int:
    bases = BaseLibrary()
    try:
        _parse_base_args(args.base_plan, bases.register_plan_file)
        _parse_base_args(args.scaled_base, bases.register_scaled_file)
    except UsageError:
        raise
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.max_n < 2:
        raise UsageError(f"--max-n must be at least 2, got {args.max_n}")

    worst: dict[str, float] = {}
    failures: list[tuple[str, int, float]] = []

    def record(identity: str, n: int, err: float) -> None:
        worst[identity] = max(worst.get(identity, 0.0), err)
        if not err < config.tolerance:
            failures.append((identity, n, err))

    for n in range(1, args.max_n + 1):
        c2, c3, c4 = dct2_matrix(n), dct3_matrix(n), dct4_matrix(n)
        r, d = r_matrix(n), d_matrix(n)
        record("dct4-via-dct2", n, float(np.max(np.abs(r @ c2 @ d - c4))))
        record("dct4-via-dct3", n, float(np.max(np.abs(d @ c3 @ r.T - c4))))
        if n % 2 == 0:
            record("dct2-split", n, _split_identity(n))

    extra = tuple(q for q in bases.registered() if q % 2 == 1)
    for n in _corpus_lengths(args.max_n, extra):
        c2 = dct2_matrix(n)
        record("kok-plan-oracle", n, float(np.max(np.abs(kok_plan(n, bases).to_matrix() - c2))))
        record("dct3-plan-oracle", n, float(np.max(np.abs(dct3_plan(n, bases).to_matrix() - dct3_matrix(n)))))
        record(
            "scaled-reconstruction",
            n,
            float(np.max(np.abs(scaled_plan(n, bases).reconstruction_matrix() - c2))),
        )
        record("folded-plan-oracle", n, float(np.max(np.abs(fold(kok_plan(n, bases)).to_matrix() - c2))))
        try:
            merged = merged_scaled_plan(n)
        except ValueError:
            pass
        else:
            record(
                "merged-scaled-oracle",
                n,
                float(np.max(np.abs(ScaledFactorization(fold(merged.plan), merged.pi, merged.delta).reconstruction_matrix() - c2))),
            )

    print(f"identity suite up to N={args.max_n} (tolerance {config.tolerance:g})")
    for identity in sorted(worst):
        print(f"{identity}: max error {worst[identity]:.3e}")
    if failures:
        for identity, n, err in failures:
            print(f"FAIL {identity} N={n}: error {err:.3e}", file=sys.stderr)
        print(f"{len(failures)} checks above tolerance", file=sys.stderr)
        return 1
    print("all identities within tolerance")
    return 0


def _add_length_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, help="transform length N")
    parser.add_argument("--q", type=int, help="odd part of N (with --m)")
    parser.add_argument("--m", type=int, help="dyadic exponent of N (with --q)")


def _add_plan_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scaled", action="store_true", help="build the scaled factorization")
    parser.add_argument("--fold", action="store_true", help="run the constant-folding pass")
    parser.add_argument(
        "--variant",
        choices=("auto", "recursive", "merged"),
        default="auto",
        help="scaled construction (merged supports lengths 2^m and 3*2^m only)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dctflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen", help="emit a plan as JSON or DOT")
    _add_length_flags(gen)
    _add_plan_flags(gen)
    gen.add_argument("--format", choices=("json", "dot"), default="json")
    gen.set_defaults(handler=cmd_gen)

    ev = sub.add_parser("eval", help="run a plan on random vectors against the dense transform")
    _add_length_flags(ev)
    _add_plan_flags(ev)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--trials", type=int, default=8)
    ev.add_argument("--tol", type=float, default=_DEFAULT_TOL)
    ev.set_defaults(handler=cmd_eval)

    count = sub.add_parser("count", help="instrument a built plan")
    _add_length_flags(count)
    _add_plan_flags(count)
    count.add_argument("--format", choices=("text", "csv"), default="text")
    count.add_argument("--compare", action="store_true", help="also print the closed form and the difference")
    count.set_defaults(handler=cmd_count)

    formula = sub.add_parser("formula", help="evaluate the closed-form counts")
    formula.add_argument("--q", type=int, required=True)
    formula.add_argument("--m", type=int, required=True)
    mode = formula.add_mutually_exclusive_group()
    mode.add_argument("--scaled", action="store_true", help="scaled counts")
    mode.add_argument("--pfa-scaled", action="store_true", help="scaled prime-factor bound (mu only)")
    mode.add_argument("--pfa-lower", action="store_true", help="unscaled prime-factor lower bound (mu only)")
    mode.add_argument("--savings", action="store_true", help="multiplications saved by scaling")
    formula.add_argument("--format", choices=("text", "csv"), default="text")
    formula.add_argument("--compare", action="store_true", help="also print instrumented plan counts and the difference")
    formula.set_defaults(handler=cmd_formula)

    table2 = sub.add_parser("table2", help="emit the scaled-complexity comparison table as CSV")
    table2.set_defaults(handler=cmd_table2)

    fig5 = sub.add_parser("fig5", help="emit normalized multiplication counts per family as CSV")
    fig5.add_argument("--max-m", type=int, default=7)
    fig5.set_defaults(handler=cmd_fig5)

    verify = sub.add_parser("verify", help="run the identity and oracle-equivalence suite")
    verify.add_argument("--max-n", type=int, default=64)
    verify.add_argument("--tol", type=float, default=_DEFAULT_TOL)
    verify.add_argument("--base-plan", action="append", metavar="Q=PATH", help="register a base plan file")
    verify.add_argument("--scaled-base", action="append", metavar="Q=PATH", help="register a scaled base file")
    verify.set_defaults(handler=cmd_verify)

    return parser


def _config_from(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        subcommand=args.subcommand,
        n=getattr(args, "n", None),
        q=getattr(args, "q", None),
        m=getattr(args, "m", None),
        scaled=getattr(args, "scaled", False),
        fold=getattr(args, "fold", False),
        fmt=getattr(args, "format", "text"),
        seed=getattr(args, "seed", 0),
        tolerance=getattr(args, "tol", _DEFAULT_TOL),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config_from(args)
        return args.handler(config, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
