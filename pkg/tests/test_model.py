from __future__ import annotations

import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jagg import (
    DimensionMismatch,
    IssueSet,
    ParseError,
    Profile,
    UnknownIssue,
    agrees,
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
from jagg.model import (
    STAR,
    ballot_to_mask,
    default_issues,
    enumerate_ballots,
    is_complete,
    mask_to_ballot,
)

from helpers import DILEMMA_ISSUES, dilemma_profile

ballots = st.integers(1, 6).flatmap(
    lambda n: st.tuples(*([st.sampled_from((0, 1))] * n)))
ballot_pairs = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.tuples(*([st.sampled_from((0, 1))] * n)),
                        st.tuples(*([st.sampled_from((0, 1))] * n))))


class TestIssueSet:
    def test_basic(self):
        s = IssueSet(("a", "b", "c"))
        assert s.n == 3
        assert s.index("b") == 1
        assert list(s) == ["a", "b", "c"]

    def test_duplicates_rejected(self):
        with pytest.raises(DimensionMismatch):
            IssueSet(("a", "a"))

    def test_unknown_name(self):
        with pytest.raises(UnknownIssue):
            IssueSet(("a",)).index("z")

    def test_bad_name(self):
        with pytest.raises(ParseError):
            IssueSet(("a b",))

    def test_default_issues(self):
        assert default_issues(3).names == ("x1", "x2", "x3")


class TestHamming:
    def test_dilemma_pairs(self):
        assert hamming((1, 1, 0), (1, 0, 1)) == 2
        assert hamming((1, 1, 0), (1, 1, 0)) == 0
        assert hamming((0,), (1,)) == 1

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hamming((1, 0), (1,))

    @given(ballot_pairs)
    def test_metric_laws(self, pair):
        a, b = pair
        assert hamming(a, b) == hamming(b, a) >= 0
        assert (hamming(a, b) == 0) == (a == b)
        assert hamming(a, b) <= len(a)

    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(
        *([st.sampled_from((0, 1))] * n),
    ).flatmap(lambda a: st.tuples(
        st.just(a),
        st.tuples(*([st.sampled_from((0, 1))] * len(a))),
        st.tuples(*([st.sampled_from((0, 1))] * len(a)))))))
    def test_triangle(self, triple):
        a, b, c = triple
        assert hamming(a, c) <= hamming(a, b) + hamming(b, c)


class TestPartialBallots:
    def test_hamming_to_partial(self):
        assert hamming_to_partial((1, 1, 0), (1, STAR, 1)) == 1
        assert hamming_to_partial((1, 1, 0), (STAR, STAR, STAR)) == 0

    def test_agrees(self):
        assert agrees((1, STAR, STAR), (1, 1, 0))
        assert not agrees((0, STAR, STAR), (1, 1, 0))

    @given(ballot_pairs)
    def test_agreement_is_zero_distance(self, pair):
        a, partial_source = pair
        partial = tuple(v if v == 1 else STAR for v in partial_source)
        assert agrees(partial, a) == (hamming_to_partial(a, partial) == 0)

    @given(ballot_pairs)
    def test_partial_distance_lower_bound(self, pair):
        a, b = pair
        partial = tuple(v if i % 2 == 0 else STAR for i, v in enumerate(b))
        assert hamming_to_partial(a, partial) <= hamming(a, b)

    def test_is_complete(self):
        assert is_complete((0, 1))
        assert not is_complete((0, STAR))


class TestMajority:
    def test_dilemma_outcome(self):
        assert majority_outcome(dilemma_profile()) == (1, 1, 1)

    def test_even_profile_ties(self):
        P = Profile(IssueSet(("a", "b")), ((1, 1), (0, 0)))
        assert majority_outcome(P) == (STAR, STAR)

    def test_even_profile_decided(self):
        P = Profile(IssueSet(("a", "b")), ((1, 1), (1, 0), (1, 0), (0, 0)))
        assert majority_outcome(P) == (1, 0)

    def test_singleton(self):
        P = Profile(IssueSet(("a",)), ((1,),))
        assert majority_outcome(P) == (1,)

    def test_strength_dilemma(self):
        P = dilemma_profile()
        assert majority_strength(P, 1) == 2
        assert majority_strength(P, -1) == 1
        assert majority_strength(P, 3) == 2

    def test_strength_unknown_issue(self):
        with pytest.raises(UnknownIssue):
            majority_strength(dilemma_profile(), 4)
        with pytest.raises(UnknownIssue):
            majority_strength(dilemma_profile(), 0)

    def test_strength_partitions_profile(self):
        P = dilemma_profile()
        for v in (1, 2, 3):
            assert majority_strength(P, v) + majority_strength(P, -v) == P.p


class TestProfileValidation:
    def test_empty_rejected(self):
        with pytest.raises(DimensionMismatch):
            Profile(DILEMMA_ISSUES, ())

    def test_ragged_rejected(self):
        with pytest.raises(DimensionMismatch):
            Profile(DILEMMA_ISSUES, ((1, 0),))

    def test_nonbinary_rejected(self):
        with pytest.raises(ParseError):
            Profile(DILEMMA_ISSUES, ((1, 2, 0),))


class TestMasks:
    @given(ballots)
    def test_roundtrip(self, b):
        assert mask_to_ballot(ballot_to_mask(b), len(b)) == b

    def test_lexicographic(self):
        got = list(enumerate_ballots(3))
        assert got == sorted(got)
        assert len(got) == 8
        assert got[0] == (0, 0, 0)
        assert got[-1] == (1, 1, 1)

    def test_msb_is_first_issue(self):
        assert ballot_to_mask((1, 0, 0)) == 4


class TestStrings:
    def test_ballot_roundtrip(self):
        assert parse_ballot("110") == (1, 1, 0)
        assert format_ballot((1, 1, 0)) == "110"

    def test_partial_roundtrip(self):
        assert parse_partial("1*0") == (1, STAR, 0)
        assert format_partial((1, STAR, 0)) == "1*0"

    def test_bad_strings(self):
        with pytest.raises(ParseError):
            parse_ballot("1*0")
        with pytest.raises(ParseError):
            parse_partial("12*")


class TestProfileIO:
    def test_roundtrip(self):
        P = dilemma_profile()
        buf = io.StringIO()
        write_profile(P, buf)
        assert read_profile(io.StringIO(buf.getvalue())) == P

    def test_comments_and_blanks(self):
        text = "# header\n\nissues a b\nballot 1 0\n# trailing\nballot 0 1\n"
        P = read_profile(io.StringIO(text))
        assert P.ballots == ((1, 0), (0, 1))

    @pytest.mark.parametrize("text", [
        "ballot 1 0\n",
        "issues a b\n",
        "issues a b\nballot 1\n",
        "issues a b\nballot 1 2\n",
        "issues a b\nwhatever\n",
        "issues a b\nissues c d\nballot 1 0\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            read_profile(io.StringIO(text))
