"""Command line interface.

Subcommands: classify, compile, encode-budget, outcome, oracle (and a
hidden instance generator, gen).  Exit codes for outcome: 0 the partial
ballot extends to a collective outcome, 1 it does not, 2 any error.
Machine mode prints exactly "YES <ballot>" or "NO" on stdout and the
engine tag on stderr.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from typing import List, Optional

from . import __version__
from .circuit import (
    BudgetSpec,
    DnnfCircuit,
    compile_cnf_to_dnnf,
    encode_budget,
    read_budget,
    read_nnf,
    write_nnf,
)
from .errors import JaggError
from .logic import classify, read_dimacs, write_dimacs
from .model import (
    IssueSet,
    default_issues,
    format_ballot,
    parse_partial,
    read_profile,
    write_profile,
    Profile,
)
from .rules import (
    Constraint,
    EngineConfig,
    default_config,
    outcome_decide,
    outcomes_bruteforce,
    validate_profile,
)

PUBLIC_COMMANDS = "{classify,compile,encode-budget,outcome,oracle}"


def _load_constraint(path: str, fmt: Optional[str], issues_hint: Optional[IssueSet]):
    """Read a constraint file; returns a Constraint.

    The format is taken from --format or guessed from the suffix.  Issue
    names declared in the file must match the profile's; files without
    declarations adopt the profile's names positionally (variables 1..n
    are the issues).
    """
    if fmt is None:
        if path.endswith(".cnf") or path.endswith(".dimacs"):
            fmt = "cnf"
        elif path.endswith(".nnf"):
            fmt = "nnf"
        elif path.endswith(".budget"):
            fmt = "budget"
        else:
            raise JaggError(f"cannot guess format of {path!r}; pass --format")
    with open(path, "r", encoding="utf-8") as fh:
        if fmt == "cnf":
            formula, declared = read_dimacs(fh)
            issues = _reconcile(declared, issues_hint, formula.num_vars, path)
            return Constraint.from_cnf(issues, formula)
        if fmt == "nnf":
            raw, declared = read_nnf(fh)
            circ = DnnfCircuit.from_nnf(raw)
            nv = max(raw.vars(), default=0)
            issues = _reconcile(declared, issues_hint, max(nv, raw.num_vars), path)
            return Constraint.from_dnnf(issues, circ)
        if fmt == "budget":
            spec = read_budget(fh)
            issues = _reconcile(None, issues_hint, spec.n, path)
            if issues.n != spec.n:
                raise JaggError(
                    f"{path}: budget spec covers {spec.n} issues, profile has {issues.n}")
            return Constraint.from_budget(issues, spec)
        raise JaggError(f"unknown constraint format {fmt!r}")


def _reconcile(declared: Optional[IssueSet], hint: Optional[IssueSet],
               num_vars: int, path: str) -> IssueSet:
    if declared is not None and hint is not None:
        if declared.names != hint.names:
            raise JaggError(
                f"{path}: issue names {list(declared.names)} do not match "
                f"the profile's {list(hint.names)}")
        return declared
    if declared is not None:
        return declared
    if hint is not None:
        if hint.n > num_vars:
            raise JaggError(
                f"{path}: profile names {hint.n} issues but the constraint "
                f"has only {num_vars} variables")
        return hint
    return default_issues(num_vars)


def _read_profile_file(path: str) -> Profile:
    with open(path, "r", encoding="utf-8") as fh:
        return read_profile(fh)


def _parse_tie_break(spec: Optional[str], issues: IssueSet) -> Optional[tuple]:
    """Comma list of literals by issue name; a bare name expands to the
    positive literal followed by the negative one."""
    if spec is None:
        return None
    out: List[int] = []
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.startswith("-"):
            out.append(-(issues.index(tok[1:]) + 1))
        else:
            v = issues.index(tok) + 1
            out.extend((v, -v))
    return tuple(out)


def _config_from_args(args) -> EngineConfig:
    cfg = default_config()
    kw = {}
    if getattr(args, "enum_cap", None) is not None:
        kw["enum_cap"] = args.enum_cap
    if getattr(args, "young_cap", None) is not None:
        kw["young_cap"] = args.young_cap
    if getattr(args, "engine", None) is not None:
        kw["engine"] = args.engine
    if kw:
        from dataclasses import replace
        cfg = replace(cfg, **kw)
    return cfg


def cmd_classify(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        formula, declared = read_dimacs(fh)
    flags = classify(formula)
    names = declared or default_issues(formula.num_vars)

    def b(x: bool) -> str:
        return "true" if x else "false"

    print(f"krom={b(flags.krom)}")
    print(f"horn={b(flags.horn)}")
    print(f"definite_horn={b(flags.definite_horn)}")
    print(f"renamable_horn={b(flags.renamable_horn)}")
    if flags.renaming is not None:
        shown = ",".join(names.names[v - 1] if v <= names.n else f"v{v}"
                         for v in sorted(flags.renaming))
        print(f"renaming={shown}")
    return 0


def cmd_compile(args) -> int:
    with open(args.cnf, "r", encoding="utf-8") as fh:
        formula, declared = read_dimacs(fh)
    t0 = time.perf_counter()
    circ = compile_cnf_to_dnnf(formula)
    elapsed = time.perf_counter() - t0
    with open(args.out, "w", encoding="utf-8") as fh:
        write_nnf(circ, fh, declared)
    print(f"nodes={circ.node_count} edges={circ.edge_count} "
          f"vars={circ.num_vars} seconds={elapsed:.4f}")
    return 0


def cmd_encode_budget(args) -> int:
    if args.budget_file:
        with open(args.budget_file, "r", encoding="utf-8") as fh:
            spec = read_budget(fh)
    else:
        if args.costs is None or args.budget is None:
            raise JaggError("encode-budget needs --budget-file or both --costs and --budget")
        try:
            costs = tuple(int(t) for t in args.costs.split(","))
        except ValueError:
            raise JaggError(f"bad --costs {args.costs!r}") from None
        spec = BudgetSpec(costs, args.budget)
    issues = (IssueSet(tuple(args.names.split(","))) if args.names
              else default_issues(spec.n))
    if issues.n != spec.n:
        raise JaggError(f"{issues.n} names for {spec.n} costs")
    t0 = time.perf_counter()
    circ = encode_budget(spec)
    elapsed = time.perf_counter() - t0
    with open(args.out, "w", encoding="utf-8") as fh:
        write_nnf(circ, fh, issues)
    print(f"nodes={circ.node_count} edges={circ.edge_count} "
          f"vars={circ.num_vars} seconds={elapsed:.4f}")
    return 0


def cmd_outcome(args) -> int:
    profile = _read_profile_file(args.profile)
    constraint = _load_constraint(args.constraint, args.format, profile.issues)
    partial = parse_partial(args.partial)
    cfg = _config_from_args(args)
    if args.tie_break:
        from dataclasses import replace
        cfg = replace(cfg, tie_break=_parse_tie_break(args.tie_break, profile.issues))
    answer = outcome_decide(args.rule, constraint, profile, partial, cfg)
    if args.explain:
        if answer.engine == "dnnf_amc":
            from .amc import dump_labelling
            from .rules import rule_labelling
            lam = rule_labelling(args.rule, constraint, profile)
            for line in dump_labelling(lam, profile.issues):
                print(line, file=sys.stderr)
        else:
            print(f"engine={answer.engine}: no labelling involved", file=sys.stderr)
    if args.machine:
        print(f"YES {format_ballot(answer.witness)}" if answer.yes else "NO")
        print(f"engine={answer.engine}", file=sys.stderr)
    else:
        if answer.yes:
            print(f"YES: outcome {format_ballot(answer.witness)} extends "
                  f"{args.partial} under {args.rule} (engine={answer.engine})")
        else:
            print(f"NO: no {args.rule} outcome extends {args.partial} "
                  f"(engine={answer.engine})")
    return 0 if answer.yes else 1


def cmd_oracle(args) -> int:
    profile = _read_profile_file(args.profile)
    constraint = _load_constraint(args.constraint, args.format, profile.issues)
    cfg = _config_from_args(args)
    outcomes = outcomes_bruteforce(args.rule, constraint, profile, cfg)
    for b in sorted(outcomes):
        print(format_ballot(b))
    if not args.machine:
        print(f"count={len(outcomes)} engine=brute_force", file=sys.stderr)
    return 0


def cmd_gen(args) -> int:
    """Hidden: write a random satisfiable CNF constraint and rational profile."""
    rng = random.Random(args.seed)
    n = args.issues
    issues = default_issues(n)
    from .logic import CnfFormula
    from .rules import rational_masks
    from .model import mask_to_ballot
    while True:
        clauses = []
        for _ in range(args.clauses):
            width = rng.choice((1, 2, 2, 3, 3))
            vs = rng.sample(range(1, n + 1), min(width, n))
            clauses.append(frozenset(v if rng.random() < 0.5 else -v for v in vs))
        formula = CnfFormula(n, tuple(clauses))
        constraint = Constraint.from_cnf(issues, formula)
        masks = rational_masks(constraint, cap=max(n, 20))
        if masks:
            break
    ballots = tuple(mask_to_ballot(rng.choice(masks), n) for _ in range(args.ballots))
    profile = Profile(issues, ballots)
    with open(args.out_prefix + ".cnf", "w", encoding="utf-8") as fh:
        write_dimacs(formula, fh, issues)
    with open(args.out_prefix + ".profile", "w", encoding="utf-8") as fh:
        write_profile(profile, fh)
    print(f"wrote {args.out_prefix}.cnf and {args.out_prefix}.profile")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jagg",
        description="Judgment aggregation: collective outcomes under "
                    "integrity constraints.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--machine", action="store_true",
                    help="terse machine-readable output")
    sub = ap.add_subparsers(dest="command", metavar=PUBLIC_COMMANDS)

    def common_caps(p):
        p.add_argument("--enum-cap", type=int, default=None,
                       help="max issues for exhaustive enumeration "
                            "(default 20, env JAGG_ENUM_CAP)")
        p.add_argument("--young-cap", type=int, default=None,
                       help="max profile size for young deletion search "
                            "(default 12, env JAGG_YOUNG_CAP)")

    p = sub.add_parser("classify", help="report CNF fragment membership")
    p.add_argument("--cnf", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compile", help="compile CNF to a DNNF circuit file")
    p.add_argument("--cnf", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("encode-budget", help="encode a budget spec as DNNF")
    p.add_argument("--budget-file")
    p.add_argument("--costs", help="comma-separated positive integer costs")
    p.add_argument("--budget", type=int, help="budget bound")
    p.add_argument("--names", help="comma-separated issue names")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode_budget)

    p = sub.add_parser("outcome", help="decide whether a partial ballot "
                                       "extends to a collective outcome")
    p.add_argument("--rule", required=True,
                   choices=("kemeny", "slater", "reversal", "young",
                            "maxhamming", "tideman"))
    p.add_argument("--constraint", required=True)
    p.add_argument("--format", choices=("cnf", "nnf", "budget"))
    p.add_argument("--profile", required=True)
    p.add_argument("--partial", required=True, help="string over 0/1/*")
    p.add_argument("--engine", choices=("auto", "amc", "krom", "tideman", "brute"))
    p.add_argument("--tie-break",
                   help="comma list of issue names or signed names, "
                        "e.g. x3,x1,x2 or x3,-x3,x1,-x1,x2,-x2")
    p.add_argument("--explain", action="store_true",
                   help="print the rule's literal labelling to stderr "
                        "(circuit engine only)")
    common_caps(p)
    p.set_defaults(func=cmd_outcome)

    p = sub.add_parser("oracle", help="exact outcome set by brute force")
    p.add_argument("--rule", required=True,
                   choices=("kemeny", "slater", "reversal", "young",
                            "maxhamming", "tideman"))
    p.add_argument("--constraint", required=True)
    p.add_argument("--format", choices=("cnf", "nnf", "budget"))
    p.add_argument("--profile", required=True)
    common_caps(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen")  # hidden: not in the metavar list above
    p.add_argument("--seed", type=int, required=True,
                   help="RNG seed for the instance generator")
    p.add_argument("--issues", type=int, default=5)
    p.add_argument("--clauses", type=int, default=6)
    p.add_argument("--ballots", type=int, default=5)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_gen)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not getattr(args, "func", None):
        ap.print_help()
        return 2
    try:
        return args.func(args)
    except JaggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
