"""Aggregation rules, outcome decisions, and engine dispatch.

Six rules: kemeny, slater, reversal, young, maxhamming, tideman.  The
outcome decision problem asks, for a rule F, constraint, profile P and
partial ballot s, whether some collective outcome in F(P) extends s.

Engines:

* ``brute_force``      definition-level search over all rational ballots,
                       capped by configuration; doubles as the oracle
* ``krom_majority``    Kemeny/Slater over Krom constraints, where the
                       majority outcome is always consistent and the rules
                       return exactly its rational completions
* ``dnnf_amc``         Kemeny/Slater/reversal over DNNF constraints via
                       two max-plus circuit evaluations
* ``tideman_iterative``  literal-by-literal construction, needing only a
                       satisfiability procedure for instantiations
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from . import amc as _amc
from . import logic as _logic
from .circuit import (
    BudgetSpec,
    DnnfCircuit,
    condition,
    encode_budget,
    satisfiable_dnnf,
)
from .errors import (
    ContractViolation,
    DimensionMismatch,
    RationalityError,
    ResourceLimit,
)
from .model import (
    Ballot,
    IssueSet,
    PartialBallot,
    Profile,
    STAR,
    agrees,
    ballot_to_mask,
    check_partial,
    format_ballot,
    majority_outcome,
    majority_strength,
    mask_to_ballot,
)

RULES = ("kemeny", "slater", "reversal", "young", "maxhamming", "tideman")
ENGINES = ("auto", "amc", "krom", "tideman", "brute")

DEFAULT_ENUM_CAP = 20
DEFAULT_YOUNG_CAP = 12


@dataclass(frozen=True)
class EngineConfig:
    """Resource caps and engine selection knobs."""

    enum_cap: int = DEFAULT_ENUM_CAP
    young_cap: int = DEFAULT_YOUNG_CAP
    engine: str = "auto"
    tie_break: Optional[tuple] = None  # permutation of all 2n literals

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ContractViolation(f"unknown engine {self.engine!r}, pick from {ENGINES}")


def default_config() -> EngineConfig:
    """Caps may be overridden by JAGG_ENUM_CAP / JAGG_YOUNG_CAP."""

    def env_int(name: str, fallback: int) -> int:
        raw = os.environ.get(name)
        if raw is None:
            return fallback
        try:
            return int(raw)
        except ValueError:
            raise ContractViolation(f"{name} must be an integer, got {raw!r}") from None

    return EngineConfig(
        enum_cap=env_int("JAGG_ENUM_CAP", DEFAULT_ENUM_CAP),
        young_cap=env_int("JAGG_YOUNG_CAP", DEFAULT_YOUNG_CAP),
    )


@dataclass(frozen=True)
class Constraint:
    """Integrity constraint over an issue set, in one of three source forms.

    Issues are variables 1..n; variables above n are auxiliary and read
    existentially: a ballot is rational when the constraint instantiated
    with it stays satisfiable.
    """

    issues: IssueSet
    kind: str  # "cnf" | "dnnf" | "budget"
    cnf: Optional[_logic.CnfFormula] = None
    circuit: Optional[DnnfCircuit] = None
    budget: Optional[BudgetSpec] = None

    @classmethod
    def from_cnf(cls, issues: IssueSet, f: _logic.CnfFormula) -> "Constraint":
        if f.num_vars < issues.n:
            raise DimensionMismatch(
                f"constraint has {f.num_vars} variables but {issues.n} issues")
        return cls(issues=issues, kind="cnf", cnf=f)

    @classmethod
    def from_dnnf(cls, issues: IssueSet, c: DnnfCircuit) -> "Constraint":
        if not isinstance(c, DnnfCircuit):
            raise ContractViolation("from_dnnf needs a certified DnnfCircuit")
        return cls(issues=issues, kind="dnnf", circuit=c)

    @classmethod
    def from_budget(cls, issues: IssueSet, spec: BudgetSpec) -> "Constraint":
        if spec.n != issues.n:
            raise DimensionMismatch(
                f"budget spec covers {spec.n} issues, issue set has {issues.n}")
        return cls(issues=issues, kind="budget", budget=spec, circuit=encode_budget(spec))

    @property
    def n(self) -> int:
        return self.issues.n

    def has_aux_vars(self) -> bool:
        if self.circuit is not None:
            cv = self.circuit.vars()
            return bool(cv) and max(cv) > self.n
        return self.cnf.num_vars > self.n

    def consistent_with(self, fixed: Mapping[int, int]) -> bool:
        """Is the constraint satisfiable with the given issues pinned?"""
        if self.circuit is not None:
            return satisfiable_dnnf(condition(self.circuit, fixed))
        return _logic.sat_auto(_logic.instantiate(self.cnf, fixed)) is not None

    def satisfiable(self) -> bool:
        return self.consistent_with({})

    def is_rational(self, ballot: Ballot) -> bool:
        if len(ballot) != self.n:
            raise DimensionMismatch(f"ballot has {len(ballot)} entries, expected {self.n}")
        return self.consistent_with({i + 1: v for i, v in enumerate(ballot)})


def validate_profile(constraint: Constraint, profile: Profile) -> None:
    """Raise RationalityError naming the first irrational ballot."""
    if profile.n != constraint.n:
        raise DimensionMismatch(
            f"profile over {profile.n} issues, constraint over {constraint.n}")
    for idx, b in enumerate(profile.ballots):
        if not constraint.is_rational(b):
            raise RationalityError(
                f"ballot {idx} ({format_ballot(b)}) violates the constraint")


def _partial_to_fixed(partial: PartialBallot) -> Dict[int, int]:
    return {i + 1: v for i, v in enumerate(partial) if v is not STAR}


def rational_masks(constraint: Constraint, cap: int) -> List[int]:
    """All rational ballots as ascending bitmasks (bit n-1-i for issue i).

    This is the exhaustive backbone of the brute-force engine; guarded by
    the enumeration cap.
    """
    n = constraint.n
    if n > cap:
        raise ResourceLimit(
            f"exhaustive enumeration over {n} issues exceeds the cap of {cap}; "
            "raise enum_cap explicitly to force it")
    if constraint.circuit is not None and not constraint.has_aux_vars():
        from .circuit import enumerate_models
        return [ballot_to_mask(b) for b in enumerate_models(constraint.circuit, n)]
    if constraint.cnf is not None and not constraint.has_aux_vars():
        f = constraint.cnf
        tests = []
        for c in f.clauses:
            pos = 0
            neg = 0
            for l in c:
                if l > 0:
                    pos |= 1 << (n - l)
                else:
                    neg |= 1 << (n + l)
            tests.append((pos, neg))
        full = (1 << n) - 1
        out = []
        for mask in range(1 << n):
            inv = mask ^ full
            if all((mask & pos) or (inv & neg) for pos, neg in tests):
                out.append(mask)
        return out
    # auxiliary variables: decide each ballot by instantiation
    out = []
    for mask in range(1 << n):
        ballot = mask_to_ballot(mask, n)
        if constraint.is_rational(ballot):
            out.append(mask)
    return out


@dataclass(frozen=True)
class OutcomeAnswer:
    """Decision plus, for YES, one witnessing collective outcome."""

    yes: bool
    witness: Optional[Ballot]
    engine: str


# ---------------------------------------------------------------------------
# Brute-force engine / oracle: direct transcriptions of the definitions.
# ---------------------------------------------------------------------------


def _majority_of_masks(masks: Sequence[int], n: int) -> PartialBallot:
    p = len(masks)
    out = []
    for i in range(n):
        bit = 1 << (n - 1 - i)
        ones = sum(1 for m in masks if m & bit)
        if 2 * ones > p:
            out.append(1)
        elif 2 * (p - ones) > p:
            out.append(0)
        else:
            out.append(STAR)
    return tuple(out)


def outcomes_bruteforce(rule: str, constraint: Constraint, profile: Profile,
                        config: Optional[EngineConfig] = None) -> FrozenSet[Ballot]:
    """Exact outcome set of a rule, straight from its definition.

    Exponential in the number of issues (and, for young, in the profile
    size); the caps in the config decide how far that is allowed to go.
    """
    config = config or default_config()
    _check_rule(rule)
    validate_profile(constraint, profile)
    n = profile.n
    rational = rational_masks(constraint, config.enum_cap)
    if not rational:
        raise RationalityError("constraint admits no rational ballot")
    prof_masks = [ballot_to_mask(b) for b in profile.ballots]

    if rule == "kemeny":
        best = None
        out = []
        for m in rational:
            score = sum((m ^ pm).bit_count() for pm in prof_masks)
            if best is None or score < best:
                best, out = score, [m]
            elif score == best:
                out.append(m)
        return frozenset(mask_to_ballot(m, n) for m in out)

    if rule == "slater":
        maj = majority_outcome(profile)
        decided = 0
        ones = 0
        for i, v in enumerate(maj):
            if v is not STAR:
                decided |= 1 << (n - 1 - i)
                if v == 1:
                    ones |= 1 << (n - 1 - i)
        best = None
        out = []
        for m in rational:
            score = ((m ^ ones) & decided).bit_count()
            if best is None or score < best:
                best, out = score, [m]
            elif score == best:
                out.append(m)
        return frozenset(mask_to_ballot(m, n) for m in out)

    if rule == "reversal":
        # support of each literal: cumulative distance to the nearest
        # rational ballot falsifying it, computed by raw enumeration
        support: Dict[int, int] = {}
        for lit in [v for v in range(1, n + 1)] + [-v for v in range(1, n + 1)]:
            bit = 1 << (n - abs(lit))
            want = 0 if lit > 0 else bit  # masks where the literal is false
            falsifying = [m for m in rational if (m & bit) == want]
            total = 0
            if falsifying:
                for pm in prof_masks:
                    total += min((m ^ pm).bit_count() for m in falsifying)
            support[lit] = total
        best = None
        out = []
        for m in rational:
            score = sum(
                support[v if m & (1 << (n - v)) else -v] for v in range(1, n + 1))
            if best is None or score > best:
                best, out = score, [m]
            elif score == best:
                out.append(m)
        return frozenset(mask_to_ballot(m, n) for m in out)

    if rule == "maxhamming":
        best = None
        out = []
        for m in rational:
            score = max((m ^ pm).bit_count() for pm in prof_masks)
            if best is None or score < best:
                best, out = score, [m]
            elif score == best:
                out.append(m)
        return frozenset(mask_to_ballot(m, n) for m in out)

    if rule == "young":
        p = profile.p
        if p > config.young_cap:
            raise ResourceLimit(
                f"young deletion search over {p} ballots exceeds the cap of "
                f"{config.young_cap}")
        rational_set = set(rational)
        for d in range(p):
            found = set()
            seen_subprofiles = set()
            for dropped in itertools.combinations(range(p), d):
                kept = tuple(sorted(
                    pm for i, pm in enumerate(prof_masks) if i not in set(dropped)))
                if kept in seen_subprofiles:
                    continue
                seen_subprofiles.add(kept)
                maj = _majority_of_masks(kept, n)
                if any(v is STAR for v in maj):
                    continue
                mask = ballot_to_mask(maj)
                if mask in rational_set:
                    found.add(maj)
            if found:
                return frozenset(found)
        raise ContractViolation("young search failed on a validated profile")

    # tideman: simulate the definition, testing consistency by enumeration
    rational_list = rational
    order = _tideman_order(profile, config.tie_break)
    fixed_bits = 0
    value_bits = 0
    for lit in order:
        v = abs(lit)
        bit = 1 << (n - v)
        if fixed_bits & bit:
            continue
        want = bit if lit > 0 else 0
        trial_fixed = fixed_bits | bit
        trial_value = value_bits | want
        if any((m & trial_fixed) == trial_value for m in rational_list):
            fixed_bits, value_bits = trial_fixed, trial_value
    assert fixed_bits == (1 << n) - 1
    return frozenset((mask_to_ballot(value_bits, n),))


def _check_rule(rule: str) -> None:
    if rule not in RULES:
        raise ContractViolation(f"unknown rule {rule!r}, pick from {RULES}")


# ---------------------------------------------------------------------------
# Tideman, iterative engine.
# ---------------------------------------------------------------------------


def _tideman_order(profile: Profile, tie_break: Optional[Sequence[int]]) -> List[int]:
    """Literals sorted by majority strength (descending), ties broken by the
    given total order on literals (default: issue order, positive first)."""
    n = profile.n
    all_lits = [l for v in range(1, n + 1) for l in (v, -v)]
    if tie_break is None:
        rank = {l: i for i, l in enumerate(all_lits)}
    else:
        tb = list(tie_break)
        if sorted(tb, key=lambda l: (abs(l), l < 0)) != sorted(
                all_lits, key=lambda l: (abs(l), l < 0)):
            raise ContractViolation(
                "tie break must be a permutation of all 2n literals")
        rank = {l: i for i, l in enumerate(tb)}
    strength = {l: majority_strength(profile, l) for l in all_lits}
    return sorted(all_lits, key=lambda l: (-strength[l], rank[l]))


def tideman_iterative(constraint: Constraint, profile: Profile,
                      tie_break: Optional[Sequence[int]] = None) -> Ballot:
    """Walk the literals from strongest majority support down, accepting
    each one that keeps the constraint satisfiable.

    Only needs instantiation plus a satisfiability call per literal, so it
    is polynomial whenever the constraint language offers tractable SAT
    (Krom, Horn, DNNF); on general CNF it falls back to exponential search
    but stays exact.
    """
    validate_profile(constraint, profile)
    n = profile.n
    fixed: Dict[int, int] = {}
    for lit in _tideman_order(profile, tie_break):
        v = abs(lit)
        want = 1 if lit > 0 else 0
        if v in fixed:
            continue
        trial = dict(fixed)
        trial[v] = want
        if constraint.consistent_with(trial):
            fixed = trial
    assert len(fixed) == n, "iteration left an issue unassigned"
    return tuple(fixed[v] for v in range(1, n + 1))


# ---------------------------------------------------------------------------
# Krom majority fast path (Kemeny and Slater).
# ---------------------------------------------------------------------------


def krom_majority_decide(rule: str, constraint: Constraint, profile: Profile,
                         partial: PartialBallot) -> OutcomeAnswer:
    """For Krom constraints the majority outcome is always consistent, and
    the majority-consistent rules return exactly its rational completions.

    The consistency guarantee is asserted against the solver, never
    assumed; a failure here would falsify the guarantee the dispatch relies on.
    """
    if rule not in ("kemeny", "slater"):
        raise ContractViolation("the Krom fast path covers kemeny and slater only")
    if constraint.cnf is None or not _logic.is_krom(constraint.cnf):
        raise ContractViolation("the Krom fast path needs a Krom CNF constraint")
    maj = majority_outcome(profile)
    maj_fixed = _partial_to_fixed(maj)
    if not constraint.consistent_with(maj_fixed):
        raise ContractViolation(
            "majority outcome inconsistent with a Krom constraint; "
            "this contradicts the pigeonhole guarantee")
    for i in range(profile.n):
        if partial[i] is not STAR and maj[i] is not STAR and partial[i] != maj[i]:
            return OutcomeAnswer(False, None, "krom_majority")
    merged = dict(maj_fixed)
    merged.update(_partial_to_fixed(partial))
    if not constraint.consistent_with(merged):
        return OutcomeAnswer(False, None, "krom_majority")
    # lexicographically smallest rational completion, fixed greedily
    for v in range(1, profile.n + 1):
        if v in merged:
            continue
        merged[v] = 0
        if not constraint.consistent_with(merged):
            merged[v] = 1
    witness = tuple(merged[v] for v in range(1, profile.n + 1))
    assert constraint.is_rational(witness)
    return OutcomeAnswer(True, witness, "krom_majority")


# ---------------------------------------------------------------------------
# DNNF fast path (Kemeny, Slater, reversal) via algebraic model counting.
# ---------------------------------------------------------------------------


def rule_labelling(rule: str, constraint: Constraint, profile: Profile) -> _amc.Labelling:
    """The max-plus labelling the AMC engine uses for this rule."""
    if rule == "kemeny":
        return _amc.kemeny_labels(profile)
    if rule == "slater":
        return _amc.slater_labels(profile)
    if rule == "reversal":
        return _amc.reversal_labels(constraint.circuit, profile)
    raise ContractViolation(f"no labelling for rule {rule!r}")


def amc_decide(rule: str, constraint: Constraint, profile: Profile,
               partial: PartialBallot) -> OutcomeAnswer:
    """Decide by comparing the unrestricted optimum with the optimum among
    ballots extending the partial one: two max-plus evaluations."""
    if constraint.circuit is None:
        raise ContractViolation("the AMC fast path needs a DNNF constraint")
    if rule not in ("kemeny", "slater", "reversal"):
        raise ContractViolation("the AMC fast path covers kemeny, slater and reversal")
    circ = constraint.circuit
    lam = rule_labelling(rule, constraint, profile)
    best = _amc.amc_evaluate(circ, _amc.MAX_PLUS, lam)
    if best == _amc.NEG_INF:
        raise RationalityError("constraint admits no rational ballot")
    fixed = _partial_to_fixed(partial)
    if not fixed:
        witness = _amc.amc_witness(circ, lam, profile.n)
        return OutcomeAnswer(True, witness, "dnnf_amc")
    restricted = _amc.restricted_best(circ, lam, fixed)
    if restricted != best:
        return OutcomeAnswer(False, None, "dnnf_amc")
    witness = _amc.amc_witness(condition(circ, fixed), lam, profile.n, presets=fixed)
    assert constraint.is_rational(witness)
    return OutcomeAnswer(True, witness, "dnnf_amc")


# ---------------------------------------------------------------------------
# Dispatch.
# ---------------------------------------------------------------------------


def _pick_engine(rule: str, constraint: Constraint, config: EngineConfig) -> str:
    choice = config.engine
    if choice == "auto":
        if rule == "tideman":
            return "tideman"
        if constraint.circuit is not None and rule in ("kemeny", "slater", "reversal"):
            return "amc"
        if (constraint.cnf is not None and rule in ("kemeny", "slater")
                and _logic.is_krom(constraint.cnf)):
            return "krom"
        return "brute"
    # explicit override: verify compatibility up front
    if choice == "amc":
        if constraint.circuit is None:
            raise ContractViolation("engine amc needs a DNNF or budget constraint")
        if rule not in ("kemeny", "slater", "reversal"):
            raise ContractViolation(f"engine amc does not implement rule {rule!r}")
    elif choice == "krom":
        if constraint.cnf is None or not _logic.is_krom(constraint.cnf):
            raise ContractViolation("engine krom needs a Krom CNF constraint")
        if rule not in ("kemeny", "slater"):
            raise ContractViolation(f"engine krom does not implement rule {rule!r}")
    elif choice == "tideman":
        if rule != "tideman":
            raise ContractViolation("engine tideman only implements rule tideman")
    return choice


def outcome_decide(rule: str, constraint: Constraint, profile: Profile,
                   partial: PartialBallot,
                   config: Optional[EngineConfig] = None) -> OutcomeAnswer:
    """Decide the outcome problem and, on YES, return a witnessing ballot.

    Picks the cheapest sound engine for the rule/constraint pair unless the
    config forces one.
    """
    config = config or default_config()
    _check_rule(rule)
    partial = check_partial(partial, constraint.n)
    validate_profile(constraint, profile)
    engine = _pick_engine(rule, constraint, config)

    if engine == "tideman":
        winner = tideman_iterative(constraint, profile, config.tie_break)
        if agrees(partial, winner):
            return OutcomeAnswer(True, winner, "tideman_iterative")
        return OutcomeAnswer(False, None, "tideman_iterative")
    if engine == "amc":
        return amc_decide(rule, constraint, profile, partial)
    if engine == "krom":
        return krom_majority_decide(rule, constraint, profile, partial)

    outcomes = outcomes_bruteforce(rule, constraint, profile, config)
    agreeing = sorted(b for b in outcomes if agrees(partial, b))
    if agreeing:
        return OutcomeAnswer(True, agreeing[0], "brute_force")
    return OutcomeAnswer(False, None, "brute_force")
