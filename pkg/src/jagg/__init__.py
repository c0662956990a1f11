"""jagg: judgment aggregation under integrity constraints.

Computes collective outcomes for six aggregation rules (kemeny, slater,
reversal, young, maxhamming, tideman) over constraints given as CNF in
restricted fragments, DNNF circuits, or budget specifications, using
polynomial fast paths where the constraint language allows them and
exact brute-force search everywhere else.
"""

__version__ = "0.1.0"

from ._kernels import IMPL as kernel_impl
from .amc import (
    MAX_PLUS,
    NEG_INF,
    POS_INF,
    Labelling,
    Semiring,
    amc_evaluate,
    amc_witness,
    axiom_failures,
    dump_labelling,
    kemeny_labels,
    restricted_best,
    reversal_labels,
    reversal_score,
    slater_labels,
)
from .circuit import (
    BudgetSpec,
    CircuitBuilder,
    DnnfCircuit,
    NnfCircuit,
    check_decomposable,
    compile_cnf_to_dnnf,
    condition,
    constant_circuit,
    encode_budget,
    entails_clause,
    enumerate_models,
    read_budget,
    read_nnf,
    satisfiable_dnnf,
    write_budget,
    write_nnf,
)
from .errors import (
    ContractViolation,
    DimensionMismatch,
    FragmentError,
    JaggError,
    NotDecomposable,
    ParseError,
    RationalityError,
    ResourceLimit,
    UnknownIssue,
)
from .logic import (
    CnfFormula,
    FragmentFlags,
    classify,
    evaluate_cnf,
    instantiate,
    is_definite_horn,
    is_horn,
    is_krom,
    read_dimacs,
    renamable_horn_set,
    rename,
    sat_auto,
    sat_generic,
    sat_horn,
    sat_krom,
    write_dimacs,
)
from .model import (
    Ballot,
    IssueSet,
    PartialBallot,
    Profile,
    STAR,
    agrees,
    default_issues,
    format_ballot,
    format_partial,
    hamming,
    hamming_to_partial,
    majority_outcome,
    majority_strength,
    parse_ballot,
    parse_partial,
    read_profile,
    write_profile,
)
from .rules import (
    Constraint,
    EngineConfig,
    OutcomeAnswer,
    default_config,
    outcome_decide,
    outcomes_bruteforce,
    rule_labelling,
    tideman_iterative,
    validate_profile,
)

__all__ = [name for name in dir() if not name.startswith("_")]
