"""Core data model: issues, ballots, profiles, and majority aggregation.

Conventions used across the package:

* An issue set is an ordered tuple of distinct names; issue positions are
  0-based internally.
* A ballot is a tuple of 0/1 ints, one entry per issue.
* A partial ballot is a tuple over {0, 1, STAR} where STAR (= None) marks
  an undecided issue.
* A literal over the issue set is a signed 1-based index: +3 is "issue 3
  true", -3 is "issue 3 false".  This matches the DIMACS convention used
  by the logic module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, TextIO

from .errors import DimensionMismatch, ParseError, UnknownIssue

Ballot = tuple  # tuple[int, ...] with entries in {0, 1}
PartialBallot = tuple  # tuple[int | None, ...]

STAR: Optional[int] = None


@dataclass(frozen=True)
class IssueSet:
    """Ordered, duplicate-free collection of issue names."""

    names: tuple

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise DimensionMismatch(f"duplicate issue names: {names}")
        for name in names:
            if not name or any(ch.isspace() for ch in name):
                raise ParseError(f"bad issue name: {name!r}")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownIssue(f"unknown issue {name!r}") from None

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)


def default_issues(n: int) -> IssueSet:
    """Issue set x1..xn used when a file does not bind its own names."""
    return IssueSet(tuple(f"x{i}" for i in range(1, n + 1)))


@dataclass(frozen=True)
class Profile:
    """Nonempty multiset of complete ballots over a fixed issue set.

    Rationality against an integrity constraint is checked at ingestion
    by the rules layer, not here; the model layer only knows shapes.
    """

    issues: IssueSet
    ballots: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        ballots = tuple(tuple(b) for b in self.ballots)
        object.__setattr__(self, "ballots", ballots)
        if not ballots:
            raise DimensionMismatch("a profile needs at least one ballot")
        n = self.issues.n
        for b in ballots:
            if len(b) != n:
                raise DimensionMismatch(f"ballot {b} has {len(b)} entries, expected {n}")
            if any(v not in (0, 1) for v in b):
                raise ParseError(f"ballot entries must be 0/1: {b}")

    @property
    def p(self) -> int:
        return len(self.ballots)

    @property
    def n(self) -> int:
        return self.issues.n


def check_ballot(ballot: Sequence, n: int) -> Ballot:
    b = tuple(ballot)
    if len(b) != n:
        raise DimensionMismatch(f"ballot has {len(b)} entries, expected {n}")
    if any(v not in (0, 1) for v in b):
        raise ParseError(f"ballot entries must be 0/1: {b}")
    return b


def check_partial(partial: Sequence, n: int) -> PartialBallot:
    s = tuple(partial)
    if len(s) != n:
        raise DimensionMismatch(f"partial ballot has {len(s)} entries, expected {n}")
    if any(v not in (0, 1, STAR) for v in s):
        raise ParseError(f"partial entries must be 0/1/STAR: {s}")
    return s


def hamming(a: Ballot, b: Ballot) -> int:
    """Number of issues on which two complete ballots disagree."""
    if len(a) != len(b):
        raise DimensionMismatch(f"ballots of different length: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def hamming_to_partial(ballot: Ballot, partial: PartialBallot) -> int:
    """Disagreements between a complete ballot and the decided part of a partial one."""
    if len(ballot) != len(partial):
        raise DimensionMismatch("length mismatch")
    return sum(p is not STAR and p != v for v, p in zip(ballot, partial))


def agrees(partial: PartialBallot, ballot: Ballot) -> bool:
    """True when the ballot extends the partial ballot on every decided issue."""
    if len(partial) != len(ballot):
        raise DimensionMismatch("length mismatch")
    return all(p is STAR or p == v for p, v in zip(partial, ballot))


def is_complete(partial: PartialBallot) -> bool:
    return all(v is not STAR for v in partial)


def literal_index(lit: int, n: int) -> int:
    v = abs(lit)
    if lit == 0 or v > n:
        raise UnknownIssue(f"literal {lit} out of range for {n} issues")
    return v - 1


def majority_strength(profile: Profile, lit: int) -> int:
    """Number of ballots in the profile that make the literal true."""
    idx = literal_index(lit, profile.n)
    want = 1 if lit > 0 else 0
    return sum(b[idx] == want for b in profile.ballots)


def majority_outcome(profile: Profile) -> PartialBallot:
    """Issue-wise strict-majority ballot; ties come out as STAR.

    Defined for profiles of any parity.  With an odd number of ballots the
    result is always complete.
    """
    p = profile.p
    out = []
    for i in range(profile.n):
        ones = sum(b[i] for b in profile.ballots)
        if 2 * ones > p:
            out.append(1)
        elif 2 * (p - ones) > p:
            out.append(0)
        else:
            out.append(STAR)
    return tuple(out)


def ballot_to_mask(ballot: Ballot) -> int:
    """Pack a ballot into an int, issue 0 as the most significant bit.

    With this orientation the natural integer order of masks is exactly the
    lexicographic order of ballots, which the enumeration APIs promise.
    """
    m = 0
    for v in ballot:
        m = (m << 1) | v
    return m


def mask_to_ballot(mask: int, n: int) -> Ballot:
    return tuple((mask >> (n - 1 - i)) & 1 for i in range(n))


def format_ballot(ballot: Ballot) -> str:
    return "".join(str(v) for v in ballot)


def format_partial(partial: PartialBallot) -> str:
    return "".join("*" if v is STAR else str(v) for v in partial)


def parse_ballot(text: str) -> Ballot:
    try:
        return tuple({"0": 0, "1": 1}[ch] for ch in text.strip())
    except KeyError:
        raise ParseError(f"bad ballot string {text!r}, expected only 0/1") from None


def parse_partial(text: str) -> PartialBallot:
    table = {"0": 0, "1": 1, "*": STAR}
    try:
        return tuple(table[ch] for ch in text.strip())
    except KeyError:
        raise ParseError(f"bad partial ballot {text!r}, expected only 0/1/*") from None


def read_profile(stream: TextIO) -> Profile:
    """Parse the line-oriented profile format.

    One ``issues`` line naming the issues in order, then one ``ballot`` line
    per ballot with space-separated 0/1 values.  Blank lines and lines
    starting with ``#`` are ignored.
    """
    issues: Optional[IssueSet] = None
    ballots = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "issues":
            if issues is not None:
                raise ParseError(f"line {lineno}: repeated issues line")
            if len(parts) < 2:
                raise ParseError(f"line {lineno}: issues line names no issues")
            issues = IssueSet(tuple(parts[1:]))
        elif parts[0] == "ballot":
            if issues is None:
                raise ParseError(f"line {lineno}: ballot before issues line")
            vals = parts[1:]
            if len(vals) != issues.n:
                raise ParseError(
                    f"line {lineno}: ballot has {len(vals)} values, expected {issues.n}"
                )
            if any(v not in ("0", "1") for v in vals):
                raise ParseError(f"line {lineno}: ballot values must be 0/1")
            ballots.append(tuple(int(v) for v in vals))
        else:
            raise ParseError(f"line {lineno}: unknown directive {parts[0]!r}")
    if issues is None:
        raise ParseError("profile has no issues line")
    if not ballots:
        raise ParseError("profile has no ballots")
    return Profile(issues, tuple(ballots))


def write_profile(profile: Profile, stream: TextIO) -> None:
    stream.write("issues " + " ".join(profile.issues.names) + "\n")
    for b in profile.ballots:
        stream.write("ballot " + " ".join(str(v) for v in b) + "\n")


def enumerate_ballots(n: int) -> Iterator[Ballot]:
    """All 2^n ballots in lexicographic order. Caller is responsible for caps."""
    for mask in range(1 << n):
        yield mask_to_ballot(mask, n)
