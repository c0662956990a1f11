"""Propositional layer: CNF formulas, fragment classification, SAT procedures.

Literals are signed 1-based ints (DIMACS style): +v / -v.  Clauses are
frozensets of literals.  When a formula serves as an integrity constraint
over n issues, variables 1..n are the issues and any variables above n are
auxiliary; rationality of a ballot then means the instantiated formula is
satisfiable (existential reading of the auxiliaries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, TextIO, Tuple

from .errors import ContractViolation, FragmentError, ParseError
from .model import IssueSet

Clause = FrozenSet[int]
Assignment = Dict[int, int]


def neg(lit: int) -> int:
    return -lit


def var_of(lit: int) -> int:
    return abs(lit)


def clause(*lits: int) -> Clause:
    return frozenset(lits)


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of clauses over variables 1..num_vars."""

    num_vars: int
    clauses: tuple  # tuple[Clause, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(frozenset(c) for c in self.clauses))
        if self.num_vars < 0:
            raise ContractViolation("num_vars must be nonnegative")
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ContractViolation(f"literal {lit} out of range in clause {sorted(c)}")
                if -lit in c:
                    raise ContractViolation(f"complementary pair in clause {sorted(c)}")

    def vars(self) -> FrozenSet[int]:
        return frozenset(abs(l) for c in self.clauses for l in c)


@dataclass(frozen=True)
class FragmentFlags:
    """Syntactic classification of a CNF formula.

    ``renaming`` is a witness set of variables whose complementation turns
    the formula Horn; it is None exactly when ``renamable_horn`` is False.
    """

    krom: bool
    horn: bool
    definite_horn: bool
    renamable_horn: bool
    renaming: Optional[FrozenSet[int]]


def is_krom(f: CnfFormula) -> bool:
    return all(len(c) <= 2 for c in f.clauses)


def is_horn(f: CnfFormula) -> bool:
    return all(sum(l > 0 for l in c) <= 1 for c in f.clauses)


def is_definite_horn(f: CnfFormula) -> bool:
    return all(sum(l > 0 for l in c) == 1 for c in f.clauses)


def renamable_horn_set(f: CnfFormula) -> Optional[FrozenSet[int]]:
    """Renaming set making the formula Horn, or None if none exists.

    Classical reduction: after complementing set R, literal l stays positive
    iff (l > 0 and var not in R) or (l < 0 and var in R).  Requiring that no
    clause keeps two positive literals yields, for every pair {l1, l2} of a
    clause, the 2-clause {l1, l2} read over renaming indicator variables.
    """
    if is_horn(f):
        return frozenset()
    pairs = set()
    for c in f.clauses:
        lits = sorted(c)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                pairs.add(frozenset((lits[i], lits[j])))
    enc = CnfFormula(f.num_vars, tuple(pairs))
    model = sat_krom(enc)
    if model is None:
        return None
    return frozenset(v for v, val in model.items() if val == 1)


def classify(f: CnfFormula) -> FragmentFlags:
    """Recompute all fragment flags from scratch; nothing is cached."""
    renaming = renamable_horn_set(f)
    return FragmentFlags(
        krom=is_krom(f),
        horn=is_horn(f),
        definite_horn=is_definite_horn(f),
        renamable_horn=renaming is not None,
        renaming=renaming,
    )


def rename(f: CnfFormula, renaming: Iterable[int]) -> CnfFormula:
    """Complement every occurrence of the given variables."""
    flip = set(renaming)
    out = []
    for c in f.clauses:
        out.append(frozenset(-l if abs(l) in flip else l for l in c))
    return CnfFormula(f.num_vars, tuple(out))


def instantiate(f: CnfFormula, assignment: Mapping[int, int]) -> CnfFormula:
    """Fix some variables: drop satisfied clauses, strip falsified literals.

    The result may contain the empty clause (then it is unsatisfiable).
    num_vars is kept unchanged so variable names stay stable.
    """
    out = []
    for c in f.clauses:
        sat = False
        rest = []
        for l in c:
            val = assignment.get(abs(l))
            if val is None:
                rest.append(l)
            elif (l > 0) == (val == 1):
                sat = True
                break
        if not sat:
            out.append(frozenset(rest))
    return CnfFormula(f.num_vars, tuple(out))


def evaluate_cnf(f: CnfFormula, assignment: Mapping[int, int]) -> bool:
    """Truth of the formula under a total assignment of its variables."""
    for c in f.clauses:
        if not any((l > 0) == (assignment[abs(l)] == 1) for l in c):
            return False
    return True


# ---------------------------------------------------------------------------
# SAT procedures.  All three return a total satisfying assignment over
# variables 1..num_vars, or None.  Unconstrained variables default to 0.
# ---------------------------------------------------------------------------


def _lit_node(lit: int) -> int:
    # positive literal of var v -> 2(v-1), negative -> 2(v-1)+1
    v = abs(lit)
    return 2 * (v - 1) + (0 if lit > 0 else 1)


def sat_krom(f: CnfFormula) -> Optional[Assignment]:
    """2SAT via the implication graph and strongly connected components."""
    if not is_krom(f):
        raise FragmentError("sat_krom needs a Krom formula (clauses of size <= 2)")
    nv = f.num_vars
    adj = [[] for _ in range(2 * nv)]
    for c in f.clauses:
        lits = list(c)
        if not lits:
            return None
        if len(lits) == 1:
            a = lits[0]
            adj[_lit_node(-a)].append(_lit_node(a))
        else:
            a, b = lits
            adj[_lit_node(-a)].append(_lit_node(b))
            adj[_lit_node(-b)].append(_lit_node(a))

    # Iterative Tarjan; components come out in reverse topological order,
    # so smaller component ids sit toward the sinks of the condensation.
    n_nodes = 2 * nv
    UNSEEN = -1
    index = [UNSEEN] * n_nodes
    low = [0] * n_nodes
    on_stack = [False] * n_nodes
    comp = [UNSEEN] * n_nodes
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n_nodes):
        if index[root] != UNSEEN:
            continue
        work = [(root, 0)]
        while work:
            v, child_pos = work[-1]
            if child_pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            descended = False
            edges = adj[v]
            for i in range(child_pos, len(edges)):
                w = edges[i]
                if index[w] == UNSEEN:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if descended:
                continue
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1

    model: Assignment = {}
    for v in range(1, nv + 1):
        pos, negn = _lit_node(v), _lit_node(-v)
        if comp[pos] == comp[negn]:
            return None
        # literal whose component is emitted earlier (closer to a sink) wins
        model[v] = 1 if comp[pos] < comp[negn] else 0
    assert evaluate_cnf(f, model)
    return model


def sat_horn(f: CnfFormula) -> Optional[Assignment]:
    """HornSAT by unit propagation; returns the minimal model when satisfiable."""
    if not is_horn(f):
        raise FragmentError("sat_horn needs a Horn formula (<= 1 positive literal per clause)")
    clauses = f.clauses
    pos_lit: list = [None] * len(clauses)
    neg_count = [0] * len(clauses)
    neg_occ: Dict[int, list] = {}
    pos_occ: Dict[int, list] = {}
    for ci, c in enumerate(clauses):
        for l in c:
            if l > 0:
                pos_lit[ci] = l
                pos_occ.setdefault(l, []).append(ci)
            else:
                neg_count[ci] += 1
                neg_occ.setdefault(-l, []).append(ci)
    satisfied = [False] * len(clauses)
    true_vars = set()
    queue = [ci for ci in range(len(clauses)) if neg_count[ci] == 0]
    while queue:
        ci = queue.pop()
        if satisfied[ci]:
            continue
        v = pos_lit[ci]
        if v is None:
            return None
        if v in true_vars:
            continue
        true_vars.add(v)
        for cj in pos_occ.get(v, ()):
            satisfied[cj] = True
        for cj in neg_occ.get(v, ()):
            neg_count[cj] -= 1
            if neg_count[cj] == 0 and not satisfied[cj]:
                queue.append(cj)
    model = {v: 1 if v in true_vars else 0 for v in range(1, f.num_vars + 1)}
    assert evaluate_cnf(f, model)
    return model


def sat_generic(f: CnfFormula) -> Optional[Assignment]:
    """DPLL with unit propagation.  Exponential worst case, by design."""

    def reduce(clauses, lit):
        out = []
        for c in clauses:
            if lit in c:
                continue
            if -lit in c:
                c = c - {-lit}
            out.append(c)
        return out

    def search(clauses, fixed):
        while True:
            unit = None
            for c in clauses:
                if not c:
                    return None
                if len(c) == 1:
                    unit = next(iter(c))
                    break
            if unit is None:
                break
            fixed = dict(fixed)
            fixed[abs(unit)] = 1 if unit > 0 else 0
            clauses = reduce(clauses, unit)
        if not clauses:
            return fixed
        branch = min(abs(l) for l in clauses[0])
        for val, lit in ((1, branch), (0, -branch)):
            sub = dict(fixed)
            sub[branch] = val
            got = search(reduce(clauses, lit), sub)
            if got is not None:
                return got
        return None

    got = search(list(f.clauses), {})
    if got is None:
        return None
    model = {v: got.get(v, 0) for v in range(1, f.num_vars + 1)}
    assert evaluate_cnf(f, model)
    return model


def sat_auto(f: CnfFormula) -> Optional[Assignment]:
    """Route to the cheapest solver the formula's fragment allows."""
    if is_krom(f):
        return sat_krom(f)
    if is_horn(f):
        return sat_horn(f)
    return sat_generic(f)


# ---------------------------------------------------------------------------
# DIMACS CNF with issue-binding comment lines:  c issue <var> <name>
# ---------------------------------------------------------------------------


def read_dimacs(stream: TextIO) -> Tuple[CnfFormula, Optional[IssueSet]]:
    """Parse DIMACS CNF.

    Lines ``c issue <var> <name>`` bind DIMACS variables to issue names; the
    file order of those lines fixes the issue order, and variables are
    renumbered so that issues occupy 1..n.  Without such lines the caller
    decides what the issues are (conventionally all variables).
    """
    num_vars = None
    num_clauses = None
    issue_decls = []
    tokens = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "issue":
                try:
                    v = int(parts[2])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad issue variable {parts[2]!r}") from None
                issue_decls.append((v, parts[3]))
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad header {line!r}")
            if num_vars is not None:
                raise ParseError(f"line {lineno}: repeated header")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad header numbers") from None
            continue
        if num_vars is None:
            raise ParseError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
    if num_vars is None:
        raise ParseError("missing p cnf header")
    clauses = []
    cur = []
    for t in tokens:
        if t == 0:
            clauses.append(frozenset(cur))
            cur = []
        else:
            if abs(t) > num_vars:
                raise ParseError(f"literal {t} exceeds declared variable count {num_vars}")
            cur.append(t)
    if cur:
        raise ParseError("last clause not terminated by 0")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ParseError(f"header declares {num_clauses} clauses, found {len(clauses)}")

    issues: Optional[IssueSet] = None
    if issue_decls:
        seen = set()
        for v, _ in issue_decls:
            if v < 1 or v > num_vars:
                raise ParseError(f"issue variable {v} out of range")
            if v in seen:
                raise ParseError(f"issue variable {v} declared twice")
            seen.add(v)
        perm = {}
        for i, (v, _) in enumerate(issue_decls, start=1):
            perm[v] = i
        nxt = len(issue_decls) + 1
        for v in range(1, num_vars + 1):
            if v not in perm:
                perm[v] = nxt
                nxt += 1
        clauses = [frozenset((1 if l > 0 else -1) * perm[abs(l)] for l in c) for c in clauses]
        issues = IssueSet(tuple(name for _, name in issue_decls))
    try:
        return CnfFormula(num_vars, tuple(clauses)), issues
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None


def write_dimacs(f: CnfFormula, stream: TextIO, issues: Optional[IssueSet] = None) -> None:
    """Serialize; issues, when given, are variables 1..n in order."""
    if issues is not None:
        if issues.n > f.num_vars:
            raise ContractViolation("more issues than variables")
        for i, name in enumerate(issues.names, start=1):
            stream.write(f"c issue {i} {name}\n")
    stream.write(f"p cnf {f.num_vars} {len(f.clauses)}\n")
    for c in f.clauses:
        lits = sorted(c, key=lambda l: (abs(l), l < 0))
        stream.write(" ".join(str(l) for l in lits) + " 0\n")
