"""Algebraic model counting over DNNF circuits and the rule labellings.

For a commutative semiring (S, plus, times, zero, one) and a labelling
lam of literals, the value of a circuit is

    plus over models m  of  times over literals true under m  of  lam(l)

A single bottom-up pass computes this on decomposable circuits provided
plus is idempotent and the labelling is neutral: plus(lam(x), lam(-x))
equals one for every variable, so variables skipped by a branch
contribute nothing.  Both preconditions are checked on every call.

The max-plus instance drives the Kemeny, Slater and reversal rules:
carrier are the integers with -inf and +inf, plus = max, times = addition
with -inf absorbing, zero = -inf, one = 0.  Note one is the integer 0,
forced by the neutrality condition max(lam(x), lam(-x)) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from array import array

from . import _kernels
from .circuit import AND, FALSE, LIT, OR, TRUE, DnnfCircuit, condition, satisfiable_dnnf
from .errors import ContractViolation, UnknownIssue
from .model import Ballot, Profile, STAR, majority_outcome
from .logic import CnfFormula  # noqa: F401  (re-exported for callers' type hints)

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class Semiring:
    """Commutative semiring with explicit identities.

    ``idempotent`` declares plus(a, a) == a; the AMC evaluator refuses to
    run without it.  Axioms are not verified on construction (they are
    properties over the whole carrier); `axiom_failures` samples them.
    """

    name: str
    plus: Callable
    times: Callable
    zero: object
    one: object
    idempotent: bool


def _mp_times(a, b):
    # -inf absorbs, even against +inf (never trust float nan arithmetic)
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


MAX_PLUS = Semiring(
    name="max-plus",
    plus=max,
    times=_mp_times,
    zero=NEG_INF,
    one=0,
    idempotent=True,
)


def axiom_failures(s: Semiring, samples: Sequence) -> List[str]:
    """Check the semiring axioms on every triple from `samples`."""
    out = []

    def bad(msg, *vals):
        out.append(msg + " at " + repr(vals))

    for a in samples:
        if s.plus(a, s.zero) != a:
            bad("plus identity fails", a)
        if s.times(a, s.one) != a:
            bad("times identity fails", a)
        if s.times(a, s.zero) != s.zero:
            bad("zero does not absorb", a)
        if s.idempotent and s.plus(a, a) != a:
            bad("plus not idempotent", a)
        for b in samples:
            if s.plus(a, b) != s.plus(b, a):
                bad("plus not commutative", a, b)
            if s.times(a, b) != s.times(b, a):
                bad("times not commutative", a, b)
            for c in samples:
                if s.plus(s.plus(a, b), c) != s.plus(a, s.plus(b, c)):
                    bad("plus not associative", a, b, c)
                if s.times(s.times(a, b), c) != s.times(a, s.times(b, c)):
                    bad("times not associative", a, b, c)
                if s.times(a, s.plus(b, c)) != s.plus(s.times(a, b), s.times(a, c)):
                    bad("times does not distribute over plus", a, b, c)
    return out


@dataclass(frozen=True)
class Labelling:
    """Literal labels for the first n variables (the issues).

    pos[i] and neg[i] label +.(i+1) and -(i+1).  Variables above n
    (auxiliaries) implicitly get the semiring's one on both signs, which
    keeps them neutral and lets them count for nothing.
    """

    pos: tuple
    neg: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "pos", tuple(self.pos))
        object.__setattr__(self, "neg", tuple(self.neg))
        if len(self.pos) != len(self.neg):
            raise ContractViolation("pos/neg label arrays differ in length")

    @property
    def n(self) -> int:
        return len(self.pos)

    def of(self, lit: int, one=0):
        v = abs(lit)
        if v == 0:
            raise UnknownIssue("literal 0")
        if v > self.n:
            return one
        return self.pos[v - 1] if lit > 0 else self.neg[v - 1]

    def is_neutral(self, s: Semiring) -> bool:
        return all(s.plus(p, q) == s.one for p, q in zip(self.pos, self.neg))


def dump_labelling(lam: Labelling, issues) -> List[str]:
    """Diagnostic dump, one `lambda <issue> <pos> <neg>` line per issue."""

    def show(x) -> str:
        return "-inf" if x == NEG_INF else str(x)

    return [f"lambda {name} {show(p)} {show(q)}"
            for name, p, q in zip(issues.names, lam.pos, lam.neg)]


def _check_amc_preconditions(c: DnnfCircuit, s: Semiring, lam: Labelling) -> None:
    if not isinstance(c, DnnfCircuit):
        raise ContractViolation("AMC needs a DnnfCircuit")
    if not s.idempotent:
        raise ContractViolation(f"semiring {s.name} is not idempotent; one pass is unsound")
    if not lam.is_neutral(s):
        raise ContractViolation("labelling is not neutral for this semiring")


def _int_like(x) -> bool:
    return isinstance(x, int) or x == NEG_INF


def _flat_labels(c: DnnfCircuit, lam: Labelling) -> array:
    vals = array("q", [0]) * (2 * c.num_vars + 2)
    sent = _kernels.NEG_SENTINEL
    for v in range(1, c.num_vars + 1):
        p = lam.of(v)
        q = lam.of(-v)
        vals[2 * v] = sent if p == NEG_INF else int(p)
        vals[2 * v + 1] = sent if q == NEG_INF else int(q)
    return vals


def _maxplus_values(c: DnnfCircuit, lam: Labelling) -> array:
    kinds, lits, starts, flat_children = c.flat()
    out = array("q", [0]) * len(kinds)
    _kernels.maxplus_pass(kinds, lits, starts, flat_children, _flat_labels(c, lam), out)
    return out


def amc_evaluate(c: DnnfCircuit, s: Semiring, lam: Labelling):
    """Semiring value of the circuit under the labelling (one bottom-up pass)."""
    _check_amc_preconditions(c, s, lam)
    if s is MAX_PLUS and all(_int_like(x) for x in lam.pos + lam.neg):
        val = _maxplus_values(c, lam)[-1]
        return NEG_INF if val == _kernels.NEG_SENTINEL else int(val)
    vals: List = [None] * len(c.kinds)
    for i, k in enumerate(c.kinds):
        if k == LIT:
            vals[i] = lam.of(c.lits[i], s.one)
        elif k == AND:
            acc = s.one
            for ch in c.children[i]:
                acc = s.times(acc, vals[ch])
            vals[i] = acc
        elif k == OR:
            acc = s.zero
            for ch in c.children[i]:
                acc = s.plus(acc, vals[ch])
            vals[i] = acc
        elif k == TRUE:
            vals[i] = s.one
        else:
            vals[i] = s.zero
    return vals[-1]


def amc_witness(c: DnnfCircuit, lam: Labelling, issues: int,
                presets: Optional[Mapping[int, int]] = None) -> Ballot:
    """A ballot attaining the max-plus optimum of the circuit.

    Walks the per-node values from the root: an OR descends into its first
    maximizing child, an AND into all children.  Issues not mentioned on
    the branch take the literal labelled one (ties go to the positive
    literal); `presets` pins values for variables the circuit was
    conditioned on.  Auxiliary variables on the branch are dropped.
    """
    _check_amc_preconditions(c, MAX_PLUS, lam)
    if not all(_int_like(x) for x in lam.pos + lam.neg):
        raise ContractViolation("witness extraction needs integer max-plus labels")
    vals = _maxplus_values(c, lam)
    if vals[-1] == _kernels.NEG_SENTINEL:
        raise ContractViolation("circuit is unsatisfiable; no witness exists")
    chosen: Dict[int, int] = {}
    stack = [c.root]
    while stack:
        i = stack.pop()
        k = c.kinds[i]
        if k == LIT:
            l = c.lits[i]
            chosen[abs(l)] = 1 if l > 0 else 0
        elif k == AND:
            stack.extend(c.children[i])
        elif k == OR:
            target = vals[i]
            for ch in c.children[i]:
                if vals[ch] == target:
                    stack.append(ch)
                    break
    presets = presets or {}
    out = []
    for v in range(1, issues + 1):
        if v in presets:
            if v in chosen and chosen[v] != presets[v]:
                raise ContractViolation(f"witness branch contradicts preset for variable {v}")
            out.append(presets[v])
        elif v in chosen:
            out.append(chosen[v])
        elif lam.of(v) == 0:
            out.append(1)
        else:
            out.append(0)
    ballot = tuple(out)
    full = {v: (ballot[v - 1] if v <= issues else chosen.get(v, 0))
            for v in range(1, c.num_vars + 1)}
    assert c.evaluate(full), "witness traceback produced a non-model"
    return ballot


def restricted_best(c: DnnfCircuit, lam: Labelling, fixed: Mapping[int, int]):
    """Best max-plus value among models extending `fixed`, in full-ballot terms.

    Conditioning strips the fixed literals from every model's product, so
    their labels are added back; an unsatisfiable restriction yields -inf.
    """
    cond = condition(c, fixed)
    if not satisfiable_dnnf(cond):
        return NEG_INF
    base = amc_evaluate(cond, MAX_PLUS, lam)
    if base == NEG_INF:
        return NEG_INF
    return base + sum(lam.of(v if val == 1 else -v) for v, val in fixed.items())


# ---------------------------------------------------------------------------
# Rule labellings.  All are integer-valued, nonpositive after shifting, and
# neutral by construction: for every issue, the preferred sign sits at 0.
# ---------------------------------------------------------------------------


def kemeny_labels(profile: Profile) -> Labelling:
    """Shifted majority strengths: the majority sign of each issue is 0,
    the minority sign loses one unit per ballot of difference."""
    pos, neg = [], []
    for i in range(profile.n):
        n1 = sum(b[i] for b in profile.ballots)
        n0 = profile.p - n1
        shift = -max(n0, n1)
        pos.append(n1 + shift)
        neg.append(n0 + shift)
    return Labelling(tuple(pos), tuple(neg))


def slater_labels(profile: Profile) -> Labelling:
    """0 for literals the majority outcome makes true or leaves open, -1
    for literals it makes false."""
    m = majority_outcome(profile)
    pos = tuple(0 if m[i] in (1, STAR) else -1 for i in range(profile.n))
    neg = tuple(0 if m[i] in (0, STAR) else -1 for i in range(profile.n))
    return Labelling(pos, neg)


def _flip_distance_labels(ballot: Ballot, n: int) -> Labelling:
    """Label literals by 0 when the ballot already satisfies them, -1 when
    making them true costs one flip."""
    pos = tuple(0 if ballot[i] == 1 else -1 for i in range(n))
    neg = tuple(0 if ballot[i] == 0 else -1 for i in range(n))
    return Labelling(pos, neg)


def reversal_score(c: DnnfCircuit, ballot: Ballot, lit: int) -> int:
    """Minimum Hamming distance from the ballot to a rational ballot that
    falsifies the literal; 0 when no rational ballot falsifies it.

    The distance splits into the forced flip on the literal's own issue
    plus the cheapest adjustment of the remaining issues, which is a
    max-plus count over the circuit conditioned to falsify the literal.
    """
    v = abs(lit)
    if not (0 < v <= len(ballot)):
        raise UnknownIssue(f"literal {lit} out of range for {len(ballot)} issues")
    cond = condition(c, {v: 0 if lit > 0 else 1})
    if not satisfiable_dnnf(cond):
        return 0
    lam = _flip_distance_labels(ballot, len(ballot))
    best = amc_evaluate(cond, MAX_PLUS, lam)
    own = 1 if ballot[v - 1] == (1 if lit > 0 else 0) else 0
    return own - int(best)


def reversal_labels(c: DnnfCircuit, profile: Profile) -> Labelling:
    """Shifted cumulative reversal scores.

    s_R(r, l) measures how entrenched literal l is for voter r; summing
    over the profile gives the support for each sign of each issue.  The
    circuit is conditioned once per literal and evaluated once per ballot.
    """
    n = profile.n
    totals = {}
    for lit in [v for v in range(1, n + 1)] + [-v for v in range(1, n + 1)]:
        v = abs(lit)
        cond = condition(c, {v: 0 if lit > 0 else 1})
        empty = not satisfiable_dnnf(cond)
        total = 0
        for r in profile.ballots:
            if empty:
                continue
            best = amc_evaluate(cond, MAX_PLUS, _flip_distance_labels(r, n))
            own = 1 if r[v - 1] == (1 if lit > 0 else 0) else 0
            total += own - int(best)
        totals[lit] = total
    pos, neg = [], []
    for v in range(1, n + 1):
        n1, n0 = totals[v], totals[-v]
        shift = -max(n0, n1)
        pos.append(n1 + shift)
        neg.append(n0 + shift)
    return Labelling(tuple(pos), tuple(neg))
