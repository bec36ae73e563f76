import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scrutineer import fixture
from scrutineer.core import (
    LEXICOGRAPHIC,
    NO_TIEBREAK,
    Profile,
    ProfileFormatError,
    ScrutineerError,
    WeakOrder,
    all_ballots,
    all_weak_orders,
    coalitions,
    enumerate_profiles,
    parse_profile,
    permute_alternatives,
    permute_voters,
    rank_of,
    render_profile,
    restrict,
    support,
)


def profiles(max_n=5, max_m=4):
    def build(nm):
        n, m = nm
        return st.lists(st.permutations(range(m)).map(tuple), min_size=n, max_size=n).map(
            lambda bs: Profile(tuple("abcdefgh"[:m]), tuple(bs)))

    return st.tuples(st.integers(1, max_n), st.integers(1, max_m)).flatmap(build)


def test_parse_counts_expand_in_order():
    p = parse_profile("alternatives: a,b\n2: a>b\n1: b>a")
    assert p.n == 3
    assert p.ballots == ((0, 1), (0, 1), (1, 0))


def test_parse_rejects_duplicate_alternative():
    with pytest.raises(ProfileFormatError, match="line 2"):
        parse_profile("alternatives: a,b\n1: a>a")


@pytest.mark.parametrize("text", [
    "",
    "1: a>b",
    "alternatives: a,b\n0: a>b",
    "alternatives: a,b\nx: a>b",
    "alternatives: a,b\n1: a>c",
    "alternatives: a,b\n1: a",
    "alternatives: a,a\n1: a>a",
    "alternatives: a,b",
])
def test_parse_rejects_malformed(text):
    with pytest.raises(ProfileFormatError):
        parse_profile(text)


def test_parse_ignores_comments_and_blank_lines():
    p = parse_profile("# header\nalternatives: a,b\n\n1: b>a  # tail\n")
    assert p.ballots == ((1, 0),)


@given(profiles())
def test_render_parse_round_trip(p):
    assert parse_profile(render_profile(p)).ballots == tuple(sorted(p.ballots, key=p.ballots.index))
    assert parse_profile(render_profile(p, runs=True)) == p


def test_pliny_fixture_counts():
    p = fixture("PLINY")
    assert p.n == 303
    assert p.ballots.count((0, 1, 2)) == 102
    assert p.ballots.count((1, 0, 2)) == 101
    assert p.ballots.count((2, 1, 0)) == 100


def test_young_fixture_counts():
    p = fixture("YOUNG")
    rows = {p.ballot_str(b): p.ballots.count(b) for b in set(p.ballots)}
    assert rows == {"a>b>c": 23, "b>c>a": 17, "b>a>c": 2, "c>a>b": 10, "c>b>a": 8}


def test_unknown_fixture():
    with pytest.raises(ScrutineerError):
        fixture("NOPE")


def test_rank_of():
    assert rank_of((0, 1, 2), 0) == 1
    assert rank_of((0, 1, 2), 2) == 3


def test_support_pliny():
    p = fixture("PLINY")
    assert support(p, 0, 1) == 102
    assert support(p, 1, 0) == 201


@given(profiles())
def test_support_pairs_sum_to_n(p):
    for x, y in itertools.permutations(p.alternatives, 2):
        assert support(p, x, y) + support(p, y, x) == p.n


def test_restrict_preserves_order():
    p = restrict(fixture("PLINY"), {0, 1})
    assert p.m == 2 and p.labels == ("a", "b")
    assert p.ballots == ((0, 1),) * 102 + ((1, 0),) * 201


def test_restrict_to_singleton():
    p = restrict(Profile.from_orders(["abc"]), {2})
    assert p.labels == ("c",)
    assert p.ballots == ((0,),)


def test_permute_voters():
    p = Profile.from_orders(["ab", "ab", "ba"])
    assert permute_voters(p, [0, 1, 2]) == p
    assert permute_voters(p, [2, 1, 0]).ballots == ((1, 0), (0, 1), (0, 1))


def test_permute_alternatives_transposition():
    p = Profile.from_orders(["ab"])
    assert permute_alternatives(p, [1, 0]).ballots == ((1, 0),)


def test_permutation_must_be_bijection():
    with pytest.raises(ScrutineerError):
        permute_voters(Profile.from_orders(["ab", "ba"]), [0, 0])


@pytest.mark.parametrize("n,m,count", [(1, 2, 2), (3, 2, 8), (2, 3, 36)])
def test_enumerate_profiles_counts(n, m, count):
    ps = list(enumerate_profiles(n, m))
    assert len(ps) == count
    assert len(set(ps)) == count


def test_enumerate_profiles_deterministic_and_budgeted():
    assert list(enumerate_profiles(2, 3)) == list(enumerate_profiles(2, 3))
    with pytest.raises(ScrutineerError):
        list(enumerate_profiles(5, 5, budget=100))


def test_all_ballots_lexicographic():
    assert all_ballots(3) == sorted(itertools.permutations(range(3)))


def test_weak_orders_count():
    # ordered Bell (Fubini) numbers
    assert [len(all_weak_orders(m)) for m in range(1, 5)] == [1, 3, 13, 75]


def test_weak_order_relations():
    w = WeakOrder((frozenset({1}), frozenset({0, 2})))
    assert w.strictly_prefers(1, 0)
    assert w.weakly_prefers(0, 2) and w.weakly_prefers(2, 0)
    assert not w.is_linear()
    assert sorted(w.linearizations()) == [(1, 0, 2), (1, 2, 0)]


def test_tiebreaks():
    assert LEXICOGRAPHIC.apply({2, 0, 1}) == frozenset({0})
    assert NO_TIEBREAK.apply({2, 0, 1}) == frozenset({0, 1, 2})


def test_coalitions_order():
    cs = coalitions(3)
    assert len(cs) == 8
    assert cs[0] == frozenset() and cs[-1] == frozenset({0, 1, 2})
    assert [len(c) for c in cs] == sorted(len(c) for c in cs)
