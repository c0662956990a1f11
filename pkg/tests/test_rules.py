from __future__ import annotations

import itertools
import random

import pytest

from jagg import (
    BudgetSpec,
    CnfFormula,
    Constraint,
    ContractViolation,
    DimensionMismatch,
    EngineConfig,
    IssueSet,
    Profile,
    RationalityError,
    ResourceLimit,
    compile_cnf_to_dnnf,
    constant_circuit,
    default_config,
    outcome_decide,
    outcomes_bruteforce,
    tideman_iterative,
    validate_profile,
)
from jagg.circuit import DnnfCircuit
from jagg.model import STAR, agrees, mask_to_ballot
from jagg.rules import (
    amc_decide,
    krom_majority_decide,
    rational_masks,
)

from helpers import (
    DILEMMA_CNF,
    random_cnf,
    random_krom,
    random_krom_horn,
    random_partial,
    random_profile,
    satisfiable_instance,
    star_out,
    dilemma_constraint,
    dilemma_profile,
    truth_table_models,
)


def issues_of(n: int) -> IssueSet:
    return IssueSet(tuple(f"x{i+1}" for i in range(n)))


class TestConstraint:
    def test_from_cnf_dimension(self):
        with pytest.raises(DimensionMismatch):
            Constraint.from_cnf(issues_of(3), CnfFormula(2, ()))

    def test_from_dnnf_needs_certificate(self):
        with pytest.raises(ContractViolation):
            Constraint.from_dnnf(issues_of(1), constant_circuit(1, True))

    def test_from_budget_dimension(self):
        with pytest.raises(DimensionMismatch):
            Constraint.from_budget(issues_of(3), BudgetSpec((1, 1), 1))

    def test_aux_vars(self):
        assert Constraint.from_cnf(issues_of(2), CnfFormula(3, ())).has_aux_vars()
        assert not dilemma_constraint().has_aux_vars()
        assert not Constraint.from_budget(issues_of(2), BudgetSpec((1, 1), 1)).has_aux_vars()

    def test_rationality_cnf(self):
        c = dilemma_constraint()
        assert c.is_rational((1, 1, 0))
        assert not c.is_rational((1, 1, 1))
        with pytest.raises(DimensionMismatch):
            c.is_rational((1, 1))

    def test_rationality_existential_aux(self):
        # x3 is auxiliary: clauses x3 and (-x3 or x1) force issue x1 true
        f = CnfFormula(3, (frozenset((3,)), frozenset((-3, 1))))
        c = Constraint.from_cnf(issues_of(2), f)
        assert c.has_aux_vars()
        assert c.is_rational((1, 0)) and c.is_rational((1, 1))
        assert not c.is_rational((0, 0)) and not c.is_rational((0, 1))

    def test_rationality_budget(self):
        c = Constraint.from_budget(issues_of(3), BudgetSpec((1, 1, 1), 2))
        assert c.is_rational((1, 1, 0))
        assert not c.is_rational((1, 1, 1))

    def test_satisfiable(self):
        f = CnfFormula(1, (frozenset((1,)), frozenset((-1,))))
        assert not Constraint.from_cnf(issues_of(1), f).satisfiable()
        assert dilemma_constraint().satisfiable()


class TestValidateProfile:
    def test_names_offending_ballot(self):
        prof = Profile(issues_of(3), ((1, 1, 0), (1, 1, 1)))
        with pytest.raises(RationalityError, match="ballot 1"):
            validate_profile(dilemma_constraint(), prof)

    def test_dimension(self):
        with pytest.raises(DimensionMismatch):
            validate_profile(dilemma_constraint(), Profile(issues_of(2), ((1, 0),)))


class TestRationalMasks:
    def test_cnf_path_matches_truth_table(self):
        rng = random.Random(1001)
        for _ in range(80):
            n = rng.randint(1, 6)
            f = random_cnf(rng, n, rng.randint(1, 6))
            c = Constraint.from_cnf(issues_of(n), f)
            assert rational_masks(c, 20) == sorted(truth_table_models(f, n))

    def test_circuit_path_matches_truth_table(self):
        rng = random.Random(1002)
        for _ in range(60):
            n = rng.randint(1, 6)
            f = random_cnf(rng, n, rng.randint(1, 6))
            c = Constraint.from_dnnf(issues_of(n), compile_cnf_to_dnnf(f))
            assert rational_masks(c, 20) == sorted(truth_table_models(f, n))

    def test_aux_path_projects_existentially(self):
        rng = random.Random(1003)
        for _ in range(40):
            n = rng.randint(1, 4)
            f = random_cnf(rng, n + 2, rng.randint(1, 6))
            c = Constraint.from_cnf(issues_of(n), f)
            assert rational_masks(c, 20) == sorted(truth_table_models(f, n))

    def test_cap(self):
        c = Constraint.from_cnf(issues_of(5), CnfFormula(5, ()))
        with pytest.raises(ResourceLimit):
            rational_masks(c, 4)


class TestBruteGoldens:
    """Frozen outcome sets for the running three-ballot example."""

    def test_kemeny(self):
        got = outcomes_bruteforce("kemeny", dilemma_constraint(), dilemma_profile())
        assert got == frozenset({(1, 1, 0), (1, 0, 1), (0, 1, 1)})

    def test_slater(self):
        got = outcomes_bruteforce("slater", dilemma_constraint(), dilemma_profile())
        assert got == frozenset({(1, 1, 0), (1, 0, 1), (0, 1, 1)})

    def test_reversal_all_tie(self):
        got = outcomes_bruteforce("reversal", dilemma_constraint(), dilemma_profile())
        assert len(got) == 7 and (1, 1, 1) not in got

    def test_young(self):
        got = outcomes_bruteforce("young", dilemma_constraint(), dilemma_profile())
        assert got == frozenset({(1, 1, 0), (1, 0, 1), (0, 1, 1)})

    def test_young_even_profile_single_deletion(self):
        prof = Profile(issues_of(3), ((1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)))
        got = outcomes_bruteforce("young", dilemma_constraint(), prof)
        assert got == frozenset({(1, 1, 0)})

    def test_maxhamming(self):
        got = outcomes_bruteforce("maxhamming", dilemma_constraint(), dilemma_profile())
        assert got == frozenset({(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)})

    def test_tideman_default_tie_break(self):
        got = outcomes_bruteforce("tideman", dilemma_constraint(), dilemma_profile())
        assert got == frozenset({(1, 1, 0)})

    def test_unknown_rule(self):
        with pytest.raises(ContractViolation):
            outcomes_bruteforce("borda", dilemma_constraint(), dilemma_profile())

    def test_unsatisfiable_constraint(self):
        f = CnfFormula(1, (frozenset((1,)), frozenset((-1,))))
        c = Constraint.from_cnf(issues_of(1), f)
        prof = Profile(issues_of(1), ((1,),))
        with pytest.raises(RationalityError):
            outcomes_bruteforce("kemeny", c, prof)


class TestCaps:
    def test_enum_cap(self):
        c = Constraint.from_cnf(issues_of(4), CnfFormula(4, ()))
        prof = Profile(issues_of(4), ((0, 0, 0, 0),))
        with pytest.raises(ResourceLimit):
            outcomes_bruteforce("kemeny", c, prof, EngineConfig(enum_cap=3))

    def test_young_cap(self):
        prof = Profile(issues_of(3), tuple(dilemma_profile().ballots) * 2)
        with pytest.raises(ResourceLimit):
            outcomes_bruteforce("young", dilemma_constraint(), prof,
                                EngineConfig(young_cap=5))

    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("JAGG_ENUM_CAP", "7")
        monkeypatch.setenv("JAGG_YOUNG_CAP", "3")
        cfg = default_config()
        assert cfg.enum_cap == 7 and cfg.young_cap == 3
        monkeypatch.setenv("JAGG_ENUM_CAP", "many")
        with pytest.raises(ContractViolation):
            default_config()


class TestTideman:
    def test_tie_break_golden(self):
        tb = (3, -3, 1, -1, 2, -2)
        got = tideman_iterative(dilemma_constraint(), dilemma_profile(), tb)
        assert got == (1, 0, 1)

    def test_default_golden(self):
        assert tideman_iterative(dilemma_constraint(), dilemma_profile()) == (1, 1, 0)

    def test_bad_tie_break(self):
        with pytest.raises(ContractViolation):
            tideman_iterative(dilemma_constraint(), dilemma_profile(), (1, -1, 2, -2))

    def test_cross_representation_agreement(self):
        """The iterative engine must produce the same ballot on a Krom CNF,
        on an equivalent Horn CNF with a redundant wide clause, and on the
        compiled circuit, and agree with the definition-level simulation."""
        rng = random.Random(42)
        for _ in range(100):
            n = rng.randint(2, 5)
            issues = issues_of(n)
            f, con, models = satisfiable_instance(
                rng, lambda: random_krom_horn(rng, n, rng.randint(1, 4)), issues)
            wide = None
            for cl in f.clauses:
                if len(cl) == 2 and n > 2:
                    extra = next(v for v in range(1, n + 1)
                                 if v not in {abs(l) for l in cl})
                    wide = frozenset(set(cl) | {-extra})
                    break
            horn_f = CnfFormula(n, f.clauses + (wide,)) if wide else f
            assert truth_table_models(horn_f, n) == truth_table_models(f, n)
            con_horn = Constraint.from_cnf(issues, horn_f)
            con_circ = Constraint.from_dnnf(issues, compile_cnf_to_dnnf(f))
            prof = random_profile(rng, models, rng.choice((1, 2, 3, 4, 5)), issues)
            tb = None
            if rng.random() < 0.5:
                lits = [l for v in range(1, n + 1) for l in (v, -v)]
                rng.shuffle(lits)
                tb = tuple(lits)
            a = tideman_iterative(con, prof, tb)
            b = tideman_iterative(con_horn, prof, tb)
            c = tideman_iterative(con_circ, prof, tb)
            assert a == b == c
            cfg = EngineConfig(tie_break=tb)
            assert outcomes_bruteforce("tideman", con, prof, cfg) == frozenset({a})

    def test_dispatch_and_partial(self):
        ans = outcome_decide("tideman", dilemma_constraint(), dilemma_profile(),
                             (1, 1, STAR))
        assert ans.yes and ans.witness == (1, 1, 0)
        assert ans.engine == "tideman_iterative"
        ans = outcome_decide("tideman", dilemma_constraint(), dilemma_profile(),
                             (0, STAR, STAR))
        assert not ans.yes and ans.witness is None


class TestKromFastPath:
    def test_worked_example(self):
        issues = issues_of(2)
        con = Constraint.from_cnf(issues, CnfFormula(2, (frozenset((-1, -2)),)))
        prof = Profile(issues, ((1, 0), (1, 0), (0, 1)))
        ans = krom_majority_decide("kemeny", con, prof, (1, STAR))
        assert ans.yes and ans.witness == (1, 0) and ans.engine == "krom_majority"
        ans = krom_majority_decide("kemeny", con, prof, (STAR, 1))
        assert not ans.yes and ans.witness is None

    def test_rejects_wrong_rule_or_fragment(self):
        con = dilemma_constraint()  # a single width-3 clause, not Krom
        with pytest.raises(ContractViolation):
            krom_majority_decide("kemeny", con, dilemma_profile(), (STAR,) * 3)
        krom = Constraint.from_cnf(issues_of(2), CnfFormula(2, (frozenset((-1, -2)),)))
        prof = Profile(issues_of(2), ((1, 0),))
        with pytest.raises(ContractViolation):
            krom_majority_decide("young", krom, prof, (STAR, STAR))

    def test_against_oracle(self):
        rng = random.Random(77)
        for _ in range(120):
            n = rng.randint(1, 6)
            issues = issues_of(n)
            f, con, models = satisfiable_instance(
                rng, lambda: random_krom(rng, n, rng.randint(1, 5)), issues)
            prof = random_profile(rng, models, rng.choice((1, 2, 3, 4, 5)), issues)
            rule = rng.choice(("kemeny", "slater"))
            partial = (star_out(rng, mask_to_ballot(rng.choice(models), n))
                       if rng.random() < 0.6 else random_partial(rng, n))
            ans = krom_majority_decide(rule, con, prof, partial)
            outcomes = outcomes_bruteforce(rule, con, prof)
            expect = any(agrees(partial, b) for b in outcomes)
            assert ans.yes == expect
            if ans.yes:
                assert agrees(partial, ans.witness)
                assert ans.witness in outcomes


class TestAmcEngine:
    def test_against_oracle(self):
        rng = random.Random(99)
        for _ in range(150):
            n = rng.randint(2, 6)
            issues = issues_of(n)
            f, _, models = satisfiable_instance(
                rng, lambda: random_cnf(rng, n, rng.randint(1, 6)), issues)
            con = Constraint.from_dnnf(issues, compile_cnf_to_dnnf(f))
            prof = random_profile(rng, models, rng.choice((1, 2, 3, 4, 5)), issues)
            rule = rng.choice(("kemeny", "slater", "reversal"))
            partial = (star_out(rng, mask_to_ballot(rng.choice(models), n))
                       if rng.random() < 0.6 else random_partial(rng, n))
            ans = amc_decide(rule, con, prof, partial)
            assert ans.engine == "dnnf_amc"
            outcomes = outcomes_bruteforce(rule, con, prof)
            expect = any(agrees(partial, b) for b in outcomes)
            assert ans.yes == expect
            if ans.yes:
                assert agrees(partial, ans.witness)
                assert ans.witness in outcomes

    def test_budget_constraint_works(self):
        issues = issues_of(3)
        con = Constraint.from_budget(issues, BudgetSpec((1, 1, 1), 2))
        prof = Profile(issues, ((1, 1, 0), (1, 0, 1), (0, 1, 1)))
        ans = amc_decide("kemeny", con, prof, (STAR, STAR, STAR))
        assert ans.yes
        assert ans.witness in outcomes_bruteforce("kemeny", con, prof)

    def test_rejects_cnf_constraint(self):
        with pytest.raises(ContractViolation):
            amc_decide("kemeny", dilemma_constraint(), dilemma_profile(), (STAR,) * 3)

    def test_rejects_uncovered_rule(self):
        con = Constraint.from_dnnf(issues_of(3), compile_cnf_to_dnnf(DILEMMA_CNF))
        with pytest.raises(ContractViolation):
            amc_decide("young", con, dilemma_profile(), (STAR,) * 3)


class TestDispatch:
    def test_auto_routes(self):
        n3 = (STAR, STAR, STAR)
        con_cnf = dilemma_constraint()
        con_circ = Constraint.from_dnnf(issues_of(3), compile_cnf_to_dnnf(DILEMMA_CNF))
        krom = Constraint.from_cnf(issues_of(2), CnfFormula(2, (frozenset((-1, -2)),)))
        prof2 = Profile(issues_of(2), ((1, 0), (1, 0), (0, 1)))
        assert outcome_decide("kemeny", con_circ, dilemma_profile(), n3).engine == "dnnf_amc"
        assert outcome_decide("kemeny", krom, prof2, (STAR, STAR)).engine == "krom_majority"
        assert outcome_decide("kemeny", con_cnf, dilemma_profile(), n3).engine == "brute_force"
        assert outcome_decide("young", con_circ, dilemma_profile(), n3).engine == "brute_force"
        assert outcome_decide("tideman", con_cnf, dilemma_profile(), n3).engine == "tideman_iterative"

    def test_explicit_engine_incompatibilities(self):
        n3 = (STAR, STAR, STAR)
        con_cnf = dilemma_constraint()
        con_circ = Constraint.from_dnnf(issues_of(3), compile_cnf_to_dnnf(DILEMMA_CNF))
        with pytest.raises(ContractViolation):
            outcome_decide("kemeny", con_cnf, dilemma_profile(), n3,
                           EngineConfig(engine="amc"))
        with pytest.raises(ContractViolation):
            outcome_decide("kemeny", con_cnf, dilemma_profile(), n3,
                           EngineConfig(engine="krom"))
        with pytest.raises(ContractViolation):
            outcome_decide("young", con_circ, dilemma_profile(), n3,
                           EngineConfig(engine="amc"))
        with pytest.raises(ContractViolation):
            outcome_decide("kemeny", con_cnf, dilemma_profile(), n3,
                           EngineConfig(engine="tideman"))

    def test_unknown_engine_name(self):
        with pytest.raises(ContractViolation):
            EngineConfig(engine="quantum")

    def test_brute_witness_is_lex_min_agreeing(self):
        ans = outcome_decide("maxhamming", dilemma_constraint(), dilemma_profile(),
                             (STAR, STAR, STAR))
        assert ans.yes and ans.witness == (0, 0, 0)
        ans = outcome_decide("maxhamming", dilemma_constraint(), dilemma_profile(),
                             (1, STAR, STAR))
        assert ans.yes and ans.witness == (1, 0, 1)

    def test_partial_validation(self):
        with pytest.raises(DimensionMismatch):
            outcome_decide("kemeny", dilemma_constraint(), dilemma_profile(), (1, STAR))

    def test_witnesses_are_rational_and_agree(self):
        rng = random.Random(1234)
        for _ in range(60):
            n = rng.randint(2, 5)
            issues = issues_of(n)
            f, con, models = satisfiable_instance(
                rng, lambda: random_cnf(rng, n, rng.randint(1, 5)), issues)
            prof = random_profile(rng, models, rng.choice((1, 3, 5)), issues)
            rule = rng.choice(("kemeny", "slater", "reversal", "young",
                               "maxhamming", "tideman"))
            partial = star_out(rng, mask_to_ballot(rng.choice(models), n))
            ans = outcome_decide(rule, con, prof, partial)
            if ans.yes:
                assert con.is_rational(ans.witness)
                assert agrees(partial, ans.witness)
