import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scrutineer import fixture
from scrutineer.core import LEXICOGRAPHIC, Profile, ScrutineerError, enumerate_profiles
from scrutineer.rules import (
    ChoiceResult,
    borda,
    borda_vector,
    condorcet_rule,
    copeland,
    dictatorship,
    dodgson,
    is_single_peaked,
    k_approval_vector,
    kemeny,
    median_rule,
    odd_rule,
    parse_rule,
    plurality,
    plurality_runoff,
    positional,
    quota_rule,
    resolve,
    standard_catalog,
    stv,
    symmetric_borda,
    veto_vector,
)
from scrutineer.tournaments import condorcet_winner

from test_core import profiles


def names(p, xs):
    return {p.labels[x] for x in xs}


EX11 = Profile.from_orders(["ab", "ab", "ba"])


def test_plurality():
    assert names(fixture("PLINY"), plurality(fixture("PLINY")).winners) == {"a"}
    assert plurality(EX11).winners == {0}
    assert plurality(Profile.from_orders(["abc", "bca", "cab"])).winners == {0, 1, 2}


def test_quota_rule():
    assert quota_rule(EX11, 2).winners == {0}
    for p in enumerate_profiles(3, 2):
        assert quota_rule(p, 4).winners == {0, 1}


def test_dictatorship():
    assert dictatorship(EX11, 2).winners == {1}
    assert dictatorship(fixture("PLINY"), 0).winners == {0}
    unanimous = Profile.from_orders(["bac"] * 3)
    assert dictatorship(unanimous, 1).winners == plurality(unanimous).winners


def test_condorcet_rule():
    p = fixture("CONDORCET3")
    assert names(p, condorcet_rule(p).winners) == {"a", "b", "c", "d"}
    assert names(fixture("PLINY"), condorcet_rule(fixture("PLINY")).winners) == {"b"}
    assert condorcet_rule(Profile.from_orders(["a"])).winners == {0}


def test_copeland():
    p = fixture("CONDORCET3")
    assert names(p, copeland(p).winners) == {"a", "b", "c"}
    gore = fixture("GORE")
    assert names(gore, copeland(gore).winners) == {"Gore"}
    assert copeland(fixture("CONDORCET1")).winners == {0, 1, 2}


def test_borda_gore_scores():
    gore = fixture("GORE")
    res = positional(gore, borda_vector(4))
    scores = {gore.labels[x]: s for x, s in res.scores.items()}
    # Bush: 3*48 + 2*50 + 1*2; Buchanan is recomputed from the fixture rows
    assert scores["Bush"] == 3 * 48 + 2 * 50 + 1 * 2 == 246
    assert scores["Gore"] == 200 and scores["Nader"] == 55
    assert scores["Buchanan"] == 99
    assert sum(scores.values()) == 6 * gore.n
    assert names(gore, res.winners) == {"Bush"}


def test_score_vectors():
    assert borda_vector(4) == (3, 2, 1, 0)
    assert veto_vector(3) == (1, 1, 0)
    assert k_approval_vector(4, 2) == (1, 1, 0, 0)


@given(profiles(max_m=4), st.integers(1, 4))
def test_unanimity_for_decreasing_scores(p, extra):
    unanimous = Profile(p.labels, (p.ballots[0],) * p.n)
    w = tuple(extra * (p.m - k) for k in range(p.m))
    assert positional(unanimous, w).winners == {p.ballots[0][0]}


def test_symmetric_borda():
    gore = fixture("GORE")
    assert names(gore, symmetric_borda(gore).winners) == {"Bush"}
    assert symmetric_borda(fixture("CONDORCET1")).winners == {0, 1, 2}
    for p in enumerate_profiles(3, 2):
        assert symmetric_borda(p).winners == plurality(p).winners


@given(profiles())
def test_symmetric_borda_equals_borda(p):
    assert symmetric_borda(p).winners == borda(p).winners


def test_runoff():
    a, b = fixture("RUNOFF_A"), fixture("RUNOFF_B")
    ra = plurality_runoff(a)
    assert names(a, ra.winners) == {"c"}
    assert ra.trace[-1]["scores"] == {a.index("a"): 8, a.index("c"): 17}
    rb = plurality_runoff(b)
    assert names(b, rb.winners) == {"b"}
    assert sorted(rb.trace[-1]["scores"].values()) == [12, 13]
    assert plurality_runoff(Profile.from_orders(["cab"] * 3)).winners == {2}


def test_stv():
    assert names(fixture("PLINY"), stv(fixture("PLINY")).winners) == {"b"}
    assert stv(fixture("CONDORCET1")).winners == {0, 1, 2}
    assert stv(Profile.from_orders(["bca", "bac", "cab"])).winners == {1}


def test_kemeny_young():
    p = fixture("YOUNG")
    res = kemeny(p)
    assert names(p, res.winners) == {"b"}
    assert res.extras["distance"] == 76
    assert res.extras["orders"] == [(1, 2, 0)]


def test_kemeny_unanimous():
    res = kemeny(Profile.from_orders(["cab"] * 4))
    assert res.winners == {2} and res.extras["distance"] == 0


def test_kemeny_budget():
    with pytest.raises(ScrutineerError):
        kemeny(Profile.from_orders(["abcde"]), max_m=4)


def test_dodgson():
    assert names(fixture("PLINY"), dodgson(fixture("PLINY")).winners) == {"b"}
    res = dodgson(fixture("CONDORCET1"))
    assert res.winners == {0, 1, 2} and res.extras["distance"] == 1


@given(profiles(max_n=4, max_m=3))
def test_dodgson_picks_condorcet_winner(p):
    cw = condorcet_winner(p)
    if cw:
        res = dodgson(p)
        assert res.winners == cw and res.extras["distance"] == 0


def test_odd_rule():
    assert odd_rule(Profile.from_orders(["ab", "ab", "ba"])).winners == {1}
    assert odd_rule(Profile.from_orders(["ab", "ba", "ba"])).winners == {0}
    assert odd_rule(Profile.from_orders(["ab"])).winners == {0}


def test_median_rule():
    hikers = fixture("HIKERS")
    assert names(hikers, median_rule(hikers, ("l", "m", "s")).winners) == {"m"}
    one = Profile.from_orders(["bac"])
    assert median_rule(one, (0, 1, 2)).winners == {1}
    with pytest.raises(ScrutineerError):
        median_rule(fixture("CONDORCET1"), (0, 1, 2))


def test_single_peaked_detection():
    hikers = fixture("HIKERS")
    lms = tuple(hikers.index(x) for x in "lms")
    assert is_single_peaked(hikers, lms)
    assert not is_single_peaked(fixture("CONDORCET1"), (0, 1, 2))


def test_resolve():
    r = ChoiceResult(frozenset({0, 1, 2}))
    assert resolve(r, LEXICOGRAPHIC) == {0}
    assert names(fixture("SP_RESOLUTE"), parse_rule("plurality+lex")(fixture("SP_RESOLUTE"))) == {"a"}


def test_empty_result_rejected():
    with pytest.raises(ScrutineerError):
        ChoiceResult(frozenset())


@pytest.mark.parametrize("spec", ["plurality", "borda+lex", "dictatorship:1", "quota:2",
                                  "approval:2", "positional:2,1,0", "median:a>b>c", "veto"])
def test_parse_rule_round_trip(spec):
    assert parse_rule(parse_rule(spec).spec()).spec() == parse_rule(spec).spec()


@pytest.mark.parametrize("spec", ["nope", "dictatorship", "plurality:3", "quota:x"])
def test_parse_rule_errors(spec):
    with pytest.raises(ScrutineerError):
        parse_rule(spec)


def test_rule_handle_score_vector():
    assert parse_rule("borda").score_vector(3) == (2, 1, 0)
    assert parse_rule("copeland").score_vector(3) is None


def test_catalog_rules_return_nonempty_sets():
    for n, m in [(3, 2), (2, 3)]:
        for rule in standard_catalog(n, m):
            for p in enumerate_profiles(n, m):
                out = rule(p)
                assert out and out <= set(range(m)), rule.spec()


def test_positional_scores_are_exact():
    res = positional(EX11, (Fraction(1, 3), 0))
    assert res.scores == {0: Fraction(2, 3), 1: Fraction(1, 3)}


def test_all_ballot_tops_distinct_plurality_ties():
    for perm in itertools.permutations("abc"):
        p = Profile.from_orders(["".join(perm[i:] + perm[:i]) for i in range(3)], labels="abc")
        assert plurality(p).winners == {0, 1, 2}
