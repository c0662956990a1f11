"""Circuits in negation normal form, decomposability, and DNNF constructions.

A circuit is a rooted DAG stored as parallel arrays in topological order
(children strictly before parents, root last).  Node kinds: FALSE, TRUE,
LIT, AND, OR.  Decomposable circuits (no variable shared between children
of an AND node) get the DnnfCircuit type, which is the admission ticket
for the polynomial operations: satisfiability, conditioning, clause
entailment, model enumeration and algebraic model counting.

Construction goes through CircuitBuilder, which hash-conses nodes and
applies cheap semantic folds:

* AND absorbs FALSE, drops TRUE, collapses complementary literal children
  to FALSE;
* OR absorbs TRUE, drops FALSE, collapses complementary literal children
  to TRUE (this is what turns "spend or don't spend" dead ends in the
  budget grid into constants);
* duplicate children are merged, single children are inlined.
"""

from __future__ import annotations

import itertools
from array import array
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, TextIO, Tuple

from . import _kernels
from .errors import ContractViolation, NotDecomposable, ParseError, ResourceLimit
from .logic import CnfFormula
from .model import Ballot, IssueSet, mask_to_ballot

FALSE, TRUE, LIT, AND, OR = range(5)

_KIND_NAMES = ("false", "true", "lit", "and", "or")


class NnfCircuit:
    """Immutable NNF DAG over variables 1..num_vars."""

    __slots__ = ("num_vars", "kinds", "lits", "children", "_flat", "_varmasks")

    def __init__(self, num_vars: int, kinds: Sequence[int], lits: Sequence[int],
                 children: Sequence[Tuple[int, ...]]):
        if not kinds:
            raise ContractViolation("a circuit needs at least one node")
        if not (len(kinds) == len(lits) == len(children)):
            raise ContractViolation("parallel arrays of different lengths")
        for i, (k, l, chs) in enumerate(zip(kinds, lits, children)):
            if k not in (FALSE, TRUE, LIT, AND, OR):
                raise ContractViolation(f"node {i}: bad kind {k}")
            if k == LIT and not (0 < abs(l) <= num_vars):
                raise ContractViolation(f"node {i}: literal {l} out of range")
            if any(ch >= i or ch < 0 for ch in chs):
                raise ContractViolation(f"node {i}: children must precede the node")
        self.num_vars = num_vars
        self.kinds = tuple(kinds)
        self.lits = tuple(lits)
        self.children = tuple(tuple(chs) for chs in children)
        self._flat = None
        self._varmasks = None

    @property
    def root(self) -> int:
        return len(self.kinds) - 1

    @property
    def node_count(self) -> int:
        return len(self.kinds)

    @property
    def edge_count(self) -> int:
        return sum(len(chs) for chs in self.children)

    def vars(self) -> frozenset:
        return frozenset(abs(self.lits[i]) for i in range(len(self.kinds))
                         if self.kinds[i] == LIT)

    def var_masks(self) -> List[int]:
        """Per-node variable sets as bitmasks (bit v-1 for variable v)."""
        if self._varmasks is None:
            masks = [0] * len(self.kinds)
            for i, k in enumerate(self.kinds):
                if k == LIT:
                    masks[i] = 1 << (abs(self.lits[i]) - 1)
                elif k in (AND, OR):
                    m = 0
                    for ch in self.children[i]:
                        m |= masks[ch]
                    masks[i] = m
            self._varmasks = masks
        return self._varmasks

    def flat(self):
        """Flattened buffers shared with the kernel layer."""
        if self._flat is None:
            kinds = array("i", self.kinds)
            lits = array("q", self.lits)
            starts = array("i", [0] * (len(self.kinds) + 1))
            flat_children: List[int] = []
            for i, chs in enumerate(self.children):
                flat_children.extend(chs)
                starts[i + 1] = len(flat_children)
            self._flat = (kinds, lits, starts, array("i", flat_children or [0]))
        return self._flat

    def evaluate(self, assignment: Mapping[int, int]) -> bool:
        """Truth under a total assignment of the circuit's variables."""
        val = [False] * len(self.kinds)
        for i, k in enumerate(self.kinds):
            if k == LIT:
                l = self.lits[i]
                try:
                    v = assignment[abs(l)]
                except KeyError:
                    raise ContractViolation(f"assignment misses variable {abs(l)}") from None
                val[i] = (l > 0) == (v == 1)
            elif k == AND:
                val[i] = all(val[ch] for ch in self.children[i])
            elif k == OR:
                val[i] = any(val[ch] for ch in self.children[i])
            else:
                val[i] = k == TRUE
        return val[-1]

    def __repr__(self) -> str:
        return (f"<{type(self).__name__} nodes={self.node_count} "
                f"edges={self.edge_count} vars<={self.num_vars}>")


def check_decomposable(c: NnfCircuit) -> bool:
    """True when no AND node's children share a variable."""
    masks = c.var_masks()
    for i, k in enumerate(c.kinds):
        if k == AND:
            acc = 0
            for ch in c.children[i]:
                m = masks[ch]
                if acc & m:
                    return False
                acc |= m
    return True


class DnnfCircuit(NnfCircuit):
    """NNF circuit that carries a verified decomposability certificate."""

    __slots__ = ()

    @classmethod
    def from_nnf(cls, c: NnfCircuit) -> "DnnfCircuit":
        if not check_decomposable(c):
            raise NotDecomposable("circuit has an AND node with overlapping children")
        return cls._share(c)

    @classmethod
    def _share(cls, c: NnfCircuit) -> "DnnfCircuit":
        obj = object.__new__(cls)
        obj.num_vars = c.num_vars
        obj.kinds = c.kinds
        obj.lits = c.lits
        obj.children = c.children
        obj._flat = c._flat
        obj._varmasks = c._varmasks
        return obj


class CircuitBuilder:
    """Hash-consing constructor for NNF circuits."""

    def __init__(self, num_vars: int):
        if num_vars < 0:
            raise ContractViolation("num_vars must be nonnegative")
        self.num_vars = num_vars
        self._kinds: List[int] = []
        self._lits: List[int] = []
        self._children: List[Tuple[int, ...]] = []
        self._memo: Dict[tuple, int] = {}

    def _node(self, kind: int, lit: int, children: Tuple[int, ...]) -> int:
        key = (kind, lit, children)
        idx = self._memo.get(key)
        if idx is None:
            idx = len(self._kinds)
            self._kinds.append(kind)
            self._lits.append(lit)
            self._children.append(children)
            self._memo[key] = idx
        return idx

    def false(self) -> int:
        return self._node(FALSE, 0, ())

    def true(self) -> int:
        return self._node(TRUE, 0, ())

    def literal(self, lit: int) -> int:
        if lit == 0 or abs(lit) > self.num_vars:
            raise ContractViolation(f"literal {lit} out of range for {self.num_vars} variables")
        return self._node(LIT, lit, ())

    def _gather(self, ids: Iterable[int], drop: int, absorb: int) -> Optional[List[int]]:
        out: List[int] = []
        seen = set()
        for i in ids:
            k = self._kinds[i]
            if k == drop:
                continue
            if k == absorb:
                return None
            if i not in seen:
                seen.add(i)
                out.append(i)
        return out

    def _complementary_lits(self, ids: List[int]) -> bool:
        lits = {self._lits[i] for i in ids if self._kinds[i] == LIT}
        return any(-l in lits for l in lits)

    def conj(self, ids: Iterable[int]) -> int:
        out = self._gather(ids, drop=TRUE, absorb=FALSE)
        if out is None or self._complementary_lits(out):
            return self.false()
        if not out:
            return self.true()
        if len(out) == 1:
            return out[0]
        return self._node(AND, 0, tuple(sorted(out)))

    def disj(self, ids: Iterable[int]) -> int:
        out = self._gather(ids, drop=FALSE, absorb=TRUE)
        if out is None or self._complementary_lits(out):
            return self.true()
        if not out:
            return self.false()
        if len(out) == 1:
            return out[0]
        return self._node(OR, 0, tuple(sorted(out)))

    def decision(self, var: int, hi: int, lo: int) -> int:
        """(var AND hi) OR (NOT var AND lo)"""
        if var <= 0:
            raise ContractViolation("decision variable must be positive")
        return self.disj((self.conj((self.literal(var), hi)),
                          self.conj((self.literal(-var), lo))))

    def build(self, root: int) -> NnfCircuit:
        """Extract the sub-DAG under root, pruning unreachable nodes."""
        if not (0 <= root < len(self._kinds)):
            raise ContractViolation(f"root {root} out of range")
        reachable = {root}
        stack = [root]
        while stack:
            for ch in self._children[stack.pop()]:
                if ch not in reachable:
                    reachable.add(ch)
                    stack.append(ch)
        order = sorted(reachable)
        remap = {old: new for new, old in enumerate(order)}
        kinds = [self._kinds[i] for i in order]
        lits = [self._lits[i] for i in order]
        children = [tuple(remap[ch] for ch in self._children[i]) for i in order]
        return NnfCircuit(self.num_vars, kinds, lits, children)


def constant_circuit(num_vars: int, value: bool) -> NnfCircuit:
    b = CircuitBuilder(num_vars)
    return b.build(b.true() if value else b.false())


def condition(c: NnfCircuit, assignment: Mapping[int, int]):
    """Fix some variables: decided literal leaves become constants.

    The result is over the same variable universe minus the decided
    variables (which no longer occur).  Decomposability is preserved, so a
    DnnfCircuit stays a DnnfCircuit.
    """
    if not assignment:
        return c
    for v, val in assignment.items():
        if not (0 < v <= c.num_vars):
            raise ContractViolation(f"conditioned variable {v} out of range")
        if val not in (0, 1):
            raise ContractViolation(f"conditioned value must be 0/1, got {val!r}")
    b = CircuitBuilder(c.num_vars)
    remap = [0] * len(c.kinds)
    for i, k in enumerate(c.kinds):
        if k == LIT:
            l = c.lits[i]
            val = assignment.get(abs(l))
            if val is None:
                remap[i] = b.literal(l)
            elif (l > 0) == (val == 1):
                remap[i] = b.true()
            else:
                remap[i] = b.false()
        elif k == AND:
            remap[i] = b.conj([remap[ch] for ch in c.children[i]])
        elif k == OR:
            remap[i] = b.disj([remap[ch] for ch in c.children[i]])
        elif k == TRUE:
            remap[i] = b.true()
        else:
            remap[i] = b.false()
    out = b.build(remap[c.root])
    if isinstance(c, DnnfCircuit):
        return DnnfCircuit._share(out)
    return out


def satisfiable_dnnf(c: DnnfCircuit) -> bool:
    """Linear-time satisfiability; sound only because of decomposability."""
    _require_dnnf(c)
    val = [False] * len(c.kinds)
    for i, k in enumerate(c.kinds):
        if k in (LIT, TRUE):
            val[i] = True
        elif k == AND:
            val[i] = all(val[ch] for ch in c.children[i])
        elif k == OR:
            val[i] = any(val[ch] for ch in c.children[i])
    return val[-1]


def entails_clause(c: DnnfCircuit, clause: Iterable[int]) -> bool:
    """Does every model of the circuit satisfy the clause?

    Conditioning on the negation of the clause and testing emptiness.
    """
    _require_dnnf(c)
    lits = list(clause)
    if any(-l in lits for l in lits):
        return True
    falsify = {abs(l): 0 if l > 0 else 1 for l in lits}
    return not satisfiable_dnnf(condition(c, falsify))


def _require_dnnf(c) -> None:
    if not isinstance(c, DnnfCircuit):
        raise NotDecomposable("operation needs a DnnfCircuit (use DnnfCircuit.from_nnf)")


_ENUM_CHUNK = 1 << 14


def enumerate_models(c: DnnfCircuit, issues, limit: Optional[int] = None) -> Iterator[Ballot]:
    """All ballots over the issue set satisfying the circuit, lexicographically.

    Requires every circuit variable to be an issue (no auxiliaries).
    `limit` caps the issue count; callers pass their configured bound.
    """
    _require_dnnf(c)
    n = issues.n if isinstance(issues, IssueSet) else int(issues)
    if limit is not None and n > limit:
        raise ResourceLimit(f"enumeration over {n} issues exceeds the cap of {limit}")
    cvars = c.vars()
    if cvars and max(cvars) > n:
        raise ContractViolation("circuit mentions auxiliary variables; cannot enumerate ballots")
    kinds, lits, starts, flat_children = c.flat()
    total = 1 << n
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        for mask in _kernels.sat_masks(kinds, lits, starts, flat_children, n, lo, hi):
            yield mask_to_ballot(mask, n)


# ---------------------------------------------------------------------------
# CNF -> decision-DNNF compilation (Shannon expansion with unit propagation
# and formula-keyed caching).  Worst-case exponential; no size guarantee.
# ---------------------------------------------------------------------------


def compile_cnf_to_dnnf(f: CnfFormula, order: Optional[Sequence[int]] = None) -> DnnfCircuit:
    """Compile a CNF formula into an equivalent decision-DNNF circuit.

    Branches along `order` (default: variable index order).  Identical
    residual clause sets are compiled once, so the result is a DAG.
    """
    if order is None:
        order = range(1, f.num_vars + 1)
    pos = {v: i for i, v in enumerate(order)}
    missing = f.vars() - set(pos)
    if missing:
        raise ContractViolation(f"order misses variables {sorted(missing)}")

    b = CircuitBuilder(f.num_vars)
    memo: Dict[frozenset, int] = {}

    def reduce(cls, lit):
        return frozenset(c - {-lit} for c in cls if lit not in c)

    def run(cls: frozenset) -> int:
        hit = memo.get(cls)
        if hit is not None:
            return hit
        fixed = []
        cur = cls
        node = None
        while True:
            if frozenset() in cur:
                node = b.false()
                break
            unit = next((next(iter(c)) for c in cur if len(c) == 1), None)
            if unit is None:
                break
            fixed.append(unit)
            cur = reduce(cur, unit)
        if node is None:
            if not cur:
                node = b.true()
            else:
                v = min((abs(l) for c in cur for l in c), key=pos.__getitem__)
                node = b.decision(v, run(reduce(cur, v)), run(reduce(cur, -v)))
        if fixed:
            node = b.conj([b.literal(l) for l in fixed] + [node])
        memo[cls] = node
        return node

    root = run(frozenset(f.clauses))
    return DnnfCircuit.from_nnf(b.build(root))


# ---------------------------------------------------------------------------
# Budget constraints: sum of costs of accepted issues bounded by B,
# encoded as a free BDD (hence DNNF) over a grid of (issues decided,
# budget spent) states.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BudgetSpec:
    """Per-issue positive integer costs and a global budget."""

    costs: tuple
    budget: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "costs", tuple(self.costs))
        if not self.costs:
            raise ContractViolation("budget spec needs at least one issue")
        for c in self.costs:
            if not isinstance(c, int) or c < 1:
                raise ContractViolation(f"costs must be positive integers, got {c!r}")
        if not isinstance(self.budget, int) or self.budget < 0:
            raise ContractViolation(f"budget must be a nonnegative integer, got {self.budget!r}")

    @property
    def n(self) -> int:
        return len(self.costs)


def encode_budget(spec: BudgetSpec) -> DnnfCircuit:
    """Grid encoding of "total cost of accepted issues <= budget".

    State (i, j) decides issue i+1 after spending j.  Accepting moves to
    (i+1, j + cost) when that stays within budget and is a dead end
    otherwise; rejecting moves to (i+1, j).  The bottom row is TRUE.  At
    most (n+1)(budget+1) decision states exist before folding, and
    unreachable ones are pruned by the builder.
    """
    n, budget = spec.n, spec.budget
    b = CircuitBuilder(n)
    row = [b.true()] * (budget + 1)
    for i in range(n - 1, -1, -1):
        cost = spec.costs[i]
        var = i + 1
        new_row = [0] * (budget + 1)
        for j in range(budget + 1):
            spent = j + cost
            hi = row[spent] if spent <= budget else b.false()
            new_row[j] = b.decision(var, hi, row[j])
        row = new_row
    return DnnfCircuit.from_nnf(b.build(row[0]))


def read_budget(stream: TextIO) -> BudgetSpec:
    """Two-line format: ``costs c1 c2 ... cn`` and ``budget B``."""
    costs = None
    budget = None
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "costs":
            try:
                costs = tuple(int(t) for t in parts[1:])
            except ValueError:
                raise ParseError(f"line {lineno}: costs must be integers") from None
        elif parts[0] == "budget":
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: budget takes one value")
            try:
                budget = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: budget must be an integer") from None
        else:
            raise ParseError(f"line {lineno}: unknown directive {parts[0]!r}")
    if costs is None or budget is None:
        raise ParseError("budget spec needs both a costs line and a budget line")
    try:
        return BudgetSpec(costs, budget)
    except ContractViolation as exc:
        raise ParseError(str(exc)) from None


def write_budget(spec: BudgetSpec, stream: TextIO) -> None:
    stream.write("costs " + " ".join(str(c) for c in spec.costs) + "\n")
    stream.write(f"budget {spec.budget}\n")


# ---------------------------------------------------------------------------
# c2d-style NNF text format.
#
#   c <comment>                (c issue <var> <name> binds issue names)
#   nnf <nodes> <edges> <vars>
#   L <signed-literal>
#   A <child-count> <ids...>   (A 0 is TRUE)
#   O <decision-var-or-0> <child-count> <ids...>   (O 0 0 is FALSE)
#
# Nodes are implicitly indexed from 0 in declaration order; children must
# already be declared; the last node is the root.
# ---------------------------------------------------------------------------


def decision_var_of(c: NnfCircuit, i: int) -> int:
    """Variable an OR node branches on, or 0 if it is not a decision node."""
    if c.kinds[i] != OR or len(c.children[i]) != 2:
        return 0

    def fixed_lits(j: int) -> frozenset:
        if c.kinds[j] == LIT:
            return frozenset((c.lits[j],))
        if c.kinds[j] == AND:
            return frozenset(c.lits[ch] for ch in c.children[j] if c.kinds[ch] == LIT)
        return frozenset()

    a, bb = c.children[i]
    fa, fb = fixed_lits(a), fixed_lits(bb)
    for l in fa:
        if -l in fb:
            return abs(l)
    return 0


def write_nnf(c: NnfCircuit, stream: TextIO, issues: Optional[IssueSet] = None) -> None:
    if issues is not None:
        for i, name in enumerate(issues.names, start=1):
            stream.write(f"c issue {i} {name}\n")
    stream.write(f"nnf {c.node_count} {c.edge_count} {c.num_vars}\n")
    for i, k in enumerate(c.kinds):
        if k == LIT:
            stream.write(f"L {c.lits[i]}\n")
        elif k == TRUE:
            stream.write("A 0\n")
        elif k == FALSE:
            stream.write("O 0 0\n")
        elif k == AND:
            chs = c.children[i]
            stream.write("A " + " ".join(str(x) for x in (len(chs),) + chs) + "\n")
        else:
            chs = c.children[i]
            dv = decision_var_of(c, i)
            stream.write(f"O {dv} " + " ".join(str(x) for x in (len(chs),) + chs) + "\n")


def read_nnf(stream: TextIO) -> Tuple[NnfCircuit, Optional[IssueSet]]:
    """Parse the NNF format; returns the circuit and declared issues, if any.

    Issue declarations renumber variables so issues occupy 1..n, mirroring
    the DIMACS reader.  Structural folds may shrink the circuit; models are
    preserved.  Decomposability is NOT assumed here; admit the result with
    DnnfCircuit.from_nnf when a DNNF is required.
    """
    header = None
    issue_decls = []
    node_lines = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "issue":
                try:
                    issue_decls.append((int(parts[2]), parts[3]))
                except ValueError:
                    raise ParseError(f"line {lineno}: bad issue variable") from None
            continue
        if parts[0] == "nnf":
            if header is not None:
                raise ParseError(f"line {lineno}: repeated header")
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: bad header {line!r}")
            try:
                header = tuple(int(t) for t in parts[1:])
            except ValueError:
                raise ParseError(f"line {lineno}: bad header numbers") from None
            continue
        if header is None:
            raise ParseError(f"line {lineno}: node line before header")
        node_lines.append((lineno, parts))
    if header is None:
        raise ParseError("missing nnf header")
    n_nodes, n_edges, num_vars = header
    if len(node_lines) != n_nodes:
        raise ParseError(f"header declares {n_nodes} nodes, found {len(node_lines)}")

    perm = None
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
        issues = IssueSet(tuple(name for _, name in issue_decls))

    b = CircuitBuilder(num_vars)
    ids: List[int] = []
    edge_total = 0

    def child_ids(lineno: int, toks: List[str], count: int) -> List[int]:
        if len(toks) != count:
            raise ParseError(f"line {lineno}: expected {count} children, got {len(toks)}")
        out = []
        for t in toks:
            try:
                j = int(t)
            except ValueError:
                raise ParseError(f"line {lineno}: bad child id {t!r}") from None
            if not (0 <= j < len(ids)):
                raise ParseError(f"line {lineno}: child {j} not yet declared")
            out.append(ids[j])
        return out

    for lineno, parts in node_lines:
        tag = parts[0]
        try:
            if tag == "L":
                if len(parts) != 2:
                    raise ParseError(f"line {lineno}: L takes one literal")
                l = int(parts[1])
                if l == 0 or abs(l) > num_vars:
                    raise ParseError(f"line {lineno}: literal {l} out of range")
                if perm is not None:
                    l = (1 if l > 0 else -1) * perm[abs(l)]
                ids.append(b.literal(l))
            elif tag == "A":
                cnt = int(parts[1])
                edge_total += cnt
                ids.append(b.conj(child_ids(lineno, parts[2:], cnt)))
            elif tag == "O":
                if len(parts) < 3:
                    raise ParseError(f"line {lineno}: malformed O line")
                cnt = int(parts[2])
                edge_total += cnt
                ids.append(b.disj(child_ids(lineno, parts[3:], cnt)))
            else:
                raise ParseError(f"line {lineno}: unknown node tag {tag!r}")
        except ValueError:
            raise ParseError(f"line {lineno}: bad integer field") from None
    if edge_total != n_edges:
        raise ParseError(f"header declares {n_edges} edges, found {edge_total}")
    return b.build(ids[-1]), issues
