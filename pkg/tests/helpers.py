"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's fast paths: CNF truth
tables walk assignments and check clauses directly, and circuit model
sets use the plain per-assignment evaluator rather than the kernels.
"""

from __future__ import annotations

import itertools
import random
from typing import List, Optional, Set

from jagg import (
    CnfFormula,
    Constraint,
    IssueSet,
    NnfCircuit,
    Profile,
    default_issues,
)
from jagg.circuit import CircuitBuilder
from jagg.model import mask_to_ballot


def truth_table_models(f: CnfFormula, issues: Optional[int] = None) -> Set[int]:
    """Masks (over the first `issues` variables) of satisfying assignments.

    Walks all 2^num_vars assignments and checks every clause literally;
    extra variables beyond `issues` are projected out existentially.
    """
    n = issues if issues is not None else f.num_vars
    out: Set[int] = set()
    for bits in itertools.product((0, 1), repeat=f.num_vars):
        ok = True
        for c in f.clauses:
            if not any((l > 0) == (bits[abs(l) - 1] == 1) for l in c):
                ok = False
                break
        if ok:
            out.add(sum(bits[i] << (n - 1 - i) for i in range(n)))
    return out


def circuit_models_direct(c: NnfCircuit, n: int) -> Set[int]:
    """Model masks via the per-assignment evaluator (no kernels involved)."""
    out: Set[int] = set()
    num = max(c.num_vars, n)
    for bits in itertools.product((0, 1), repeat=num):
        assign = {v: bits[v - 1] for v in range(1, num + 1)}
        if c.evaluate(assign):
            out.add(sum(bits[i] << (n - 1 - i) for i in range(n)))
    return out


def random_clause(rng: random.Random, n: int, width: int) -> frozenset:
    vs = rng.sample(range(1, n + 1), min(width, n))
    return frozenset(v if rng.random() < 0.5 else -v for v in vs)


def random_cnf(rng: random.Random, n: int, m: int, widths=(1, 2, 3)) -> CnfFormula:
    return CnfFormula(n, tuple(random_clause(rng, n, rng.choice(widths)) for _ in range(m)))


def random_krom(rng: random.Random, n: int, m: int) -> CnfFormula:
    return CnfFormula(n, tuple(random_clause(rng, n, rng.choice((1, 2, 2))) for _ in range(m)))


def random_krom_horn(rng: random.Random, n: int, m: int) -> CnfFormula:
    """Clauses of width <= 2 with at most one positive literal."""
    out = []
    for _ in range(m):
        width = rng.choice((1, 2, 2))
        vs = rng.sample(range(1, n + 1), min(width, n))
        lits = [-v for v in vs]
        if rng.random() < 0.5:
            lits[0] = -lits[0]
        out.append(frozenset(lits))
    return CnfFormula(n, tuple(out))


def satisfiable_instance(rng: random.Random, make_formula, issues: IssueSet):
    """Resample until the formula admits a rational ballot; returns
    (formula, constraint, sorted rational masks)."""
    while True:
        f = make_formula()
        models = sorted(truth_table_models(f, issues.n))
        if models:
            return f, Constraint.from_cnf(issues, f), models


def random_profile(rng: random.Random, masks: List[int], p: int, issues: IssueSet) -> Profile:
    n = issues.n
    return Profile(issues, tuple(mask_to_ballot(rng.choice(masks), n) for _ in range(p)))


def random_partial(rng: random.Random, n: int) -> tuple:
    return tuple(rng.choice((0, 1, None)) for _ in range(n))


def star_out(rng: random.Random, ballot: tuple) -> tuple:
    """Partial ballot obtained by starring a random subset of a ballot."""
    return tuple(v if rng.random() < 0.5 else None for v in ballot)


def random_dnnf(rng: random.Random, variables: List[int], num_vars: int,
                depth: int = 3) -> NnfCircuit:
    """Random decomposable circuit built top-down.

    AND nodes split their variable set between children; OR nodes share it,
    so decomposability holds by construction.
    """
    b = CircuitBuilder(num_vars)

    def gen(vs: List[int], depth: int) -> int:
        if not vs:
            return b.true() if rng.random() < 0.7 else b.false()
        if depth == 0 or len(vs) == 1 or rng.random() < 0.15:
            v = rng.choice(vs)
            return b.literal(v if rng.random() < 0.5 else -v)
        if rng.random() < 0.5:
            cut = rng.randrange(1, len(vs))
            left, right = vs[:cut], vs[cut:]
            return b.conj((gen(left, depth - 1), gen(right, depth - 1)))
        return b.disj(tuple(gen(vs, depth - 1) for _ in range(rng.choice((2, 2, 3)))))

    shuffled = list(variables)
    rng.shuffle(shuffled)
    return b.build(gen(shuffled, depth))


DILEMMA_ISSUES = IssueSet(("x1", "x2", "x3"))
DILEMMA_BALLOTS = ((1, 1, 0), (1, 0, 1), (0, 1, 1))
DILEMMA_CNF = CnfFormula(3, (frozenset((-1, -2, -3)),))


def dilemma_profile() -> Profile:
    return Profile(DILEMMA_ISSUES, DILEMMA_BALLOTS)


def dilemma_constraint() -> Constraint:
    return Constraint.from_cnf(DILEMMA_ISSUES, DILEMMA_CNF)
