"""Committee selection rules and committee axioms."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    LEXICOGRAPHIC,
    NO_TIEBREAK,
    BudgetExceeded,
    ScrutineerError,
    TieBreak,
    WeakOrder,
    enumerate_profiles,
)
from .rules import borda_vector, k_approval_vector, plurality_vector, positional_scores


@dataclass
class CommitteeResult:
    committees: frozenset  # of frozensets
    scores: dict | None = None
    trace: list | None = None
    exhausted: bool = False

    def __post_init__(self):
        self.committees = frozenset(frozenset(c) for c in self.committees)
        if not self.committees:
            raise ScrutineerError("a committee rule must return at least one committee")
        if len({len(c) for c in self.committees}) != 1:
            raise ScrutineerError("committees of different sizes in one result")


def _check_k(profile, k):
    if not 1 <= k <= profile.m:
        raise ScrutineerError(f"committee size must lie in 1..{profile.m}, got {k}")


def _check_budget(m, k, budget):
    if math.comb(m, k) > budget:
        raise BudgetExceeded(f"C({m},{k}) committees exceed the budget of {budget}")


def score_order(scores):
    """The weak order ranking alternatives by decreasing score."""
    levels = sorted(set(scores.values()), reverse=True)
    return WeakOrder(tuple(frozenset(x for x, s in scores.items() if s == lv) for lv in levels))


def top_k_committees(order, k):
    """Top-k prefixes of every linearization of ``order``."""
    fixed = []
    for tier in order.tiers:
        if len(fixed) + len(tier) <= k:
            fixed.extend(tier)
            if len(fixed) == k:
                return {frozenset(fixed)}
            continue
        need = k - len(fixed)
        return {frozenset(fixed) | frozenset(extra)
                for extra in itertools.combinations(sorted(tier), need)}
    raise ScrutineerError("committee larger than the set of alternatives")


def scoring_weights(scoring, m, k):
    scoring = scoring.lower()
    if scoring == "plurality":
        return plurality_vector(m)
    if scoring == "borda":
        return borda_vector(m)
    if scoring in ("approval", "k-approval"):
        return k_approval_vector(m, k)
    raise ScrutineerError(f"unknown best-k scoring {scoring!r}")


def best_k(scoring, profile, k, weights=None):
    _check_k(profile, k)
    if weights is None:
        weights = scoring_weights(scoring, profile.m, k)
    scores = positional_scores(profile, weights)
    return CommitteeResult(top_k_committees(score_order(scores), k), scores)


def committees(m, k):
    return [frozenset(c) for c in itertools.combinations(range(m), k)]


def _maximal(values):
    best = max(values.values())
    return frozenset(c for c, v in values.items() if v == best)


def chamberlin_courant(profile, k, weights=None, budget=10**6):
    _check_k(profile, k)
    _check_budget(profile.m, k, budget)
    weights = borda_vector(profile.m) if weights is None else tuple(Fraction(w) for w in weights)
    if len(weights) != profile.m:
        raise ScrutineerError("score vector length must equal the number of alternatives")
    values = {}
    for c in committees(profile.m, k):
        total = Fraction(0)
        for b in profile.ballots:
            total += weights[min(b.index(x) for x in c)]
        values[c] = total
    return CommitteeResult(_maximal(values), values)


def harmonic(t):
    return sum((Fraction(1, j) for j in range(1, t + 1)), Fraction(0))


def pav_k(profile, k, budget=10**6):
    _check_k(profile, k)
    _check_budget(profile.m, k, budget)
    tops = [frozenset(b[:k]) for b in profile.ballots]
    values = {c: sum((harmonic(len(t & c)) for t in tops), Fraction(0))
              for c in committees(profile.m, k)}
    return CommitteeResult(_maximal(values), values)


def _restricted_scores(profile, remaining, voters=None):
    scores = {x: 0 for x in remaining}
    rows = profile.ballots if voters is None else (profile.ballots[i] for i in voters)
    for b in rows:
        for x in b:
            if x in scores:
                scores[x] += 1
                break
    return scores


def sequential_plurality(profile, k, tiebreak=NO_TIEBREAK):
    _check_k(profile, k)
    if isinstance(tiebreak, str):
        tiebreak = LEXICOGRAPHIC if tiebreak.startswith("lex") else TieBreak(tiebreak)
    results = set()
    trace = []

    def step(chosen, remaining):
        if len(chosen) == k:
            results.add(frozenset(chosen))
            return
        scores = _restricted_scores(profile, remaining)
        top = max(scores.values())
        winners = tiebreak.apply(x for x, s in scores.items() if s == top)
        trace.append({"chosen": list(chosen), "scores": scores, "winners": sorted(winners)})
        for w in sorted(winners):
            step(chosen + [w], [x for x in remaining if x != w])

    step([], list(profile.alternatives))
    return CommitteeResult(results, None, trace)


def droop_quota(n, k):
    return n // (k + 1) + 1


class CSTVMode(enum.Enum):
    CANONICAL = "canonical"
    PARALLEL = "parallel"


def cstv(profile, k, mode=CSTVMode.CANONICAL, branch_budget=10**5):
    """Committee STV with the Droop quota.

    A stage elects an alternative whose plurality score among the remaining
    voters reaches the quota and drops ``q`` of its supporters; otherwise it
    drops one alternative with the lowest score. Once the remaining
    alternatives exactly fill the open seats they are all elected.
    Canonical mode takes the least alternative and the lowest-indexed
    voters; parallel mode follows every choice, up to ``branch_budget`` states.
    """
    _check_k(profile, k)
    mode = CSTVMode(mode)
    q = droop_quota(profile.n, k)
    results = set()
    trace = []
    seen = set()
    exhausted = False
    states = 0

    def explore(elected, remaining, voters):
        nonlocal exhausted, states
        key = (elected, remaining, voters)
        if key in seen:
            return
        seen.add(key)
        states += 1
        if states > branch_budget:
            exhausted = True
            return
        open_seats = k - len(elected)
        if open_seats == 0:
            results.add(elected)
            return
        if len(remaining) == open_seats:
            trace.append({"elected": sorted(elected), "fill": sorted(remaining), "quota": q,
                          "meeting_quota": 0, "open_seats": open_seats})
            results.add(elected | frozenset(remaining))
            return
        scores = _restricted_scores(profile, remaining, voters)
        meeting = [x for x in remaining if scores[x] >= q]
        stage = {"elected": sorted(elected), "remaining": list(remaining), "scores": scores,
                 "quota": q, "meeting_quota": len(meeting), "open_seats": open_seats}
        trace.append(stage)
        if meeting:
            picks = meeting[:1] if mode is CSTVMode.CANONICAL else meeting
            for x in picks:
                backers = [i for i in voters
                           if next(y for y in profile.ballots[i] if y in remaining) == x]
                groups = [backers[:q]] if mode is CSTVMode.CANONICAL else \
                    itertools.combinations(backers, q)
                rest_alts = tuple(y for y in remaining if y != x)
                for group in groups:
                    gone = set(group)
                    explore(elected | {x}, rest_alts, tuple(i for i in voters if i not in gone))
                    if exhausted:
                        return
            if mode is CSTVMode.CANONICAL:
                stage["action"] = ("elect", picks[0])
            return
        low = min(scores.values())
        losers = [x for x in remaining if scores[x] == low]
        picks = losers[:1] if mode is CSTVMode.CANONICAL else losers
        if mode is CSTVMode.CANONICAL:
            stage["action"] = ("eliminate", picks[0])
        for y in picks:
            explore(elected, tuple(x for x in remaining if x != y), voters)
            if exhausted:
                return

    explore(frozenset(), tuple(profile.alternatives), tuple(range(profile.n)))
    if not results:
        raise BudgetExceeded(f"CSTV branch budget {branch_budget} exhausted before any committee")
    return CommitteeResult(results, None, trace, exhausted)


def condorcet_committees(profile, k, budget=10**6):
    _check_budget(profile.m, k, budget)
    s = profile.support_matrix
    out = set()
    for c in committees(profile.m, k):
        if all(s[x][y] >= s[y][x] for x in c for y in profile.alternatives if y not in c):
            out.add(c)
    return frozenset(out)


# --- Committee rule handles and axioms ------------------------------------

@dataclass(frozen=True)
class CommitteeRule:
    name: str
    params: tuple = ()

    def __call__(self, profile, k):
        return self.evaluate(profile, k).committees

    def evaluate(self, profile, k):
        name = self.name
        if name == "best-plurality":
            return best_k("plurality", profile, k)
        if name == "best-approval":
            return best_k("approval", profile, k)
        if name == "best-borda":
            return best_k("borda", profile, k)
        if name == "chco":
            return chamberlin_courant(profile, k, self.params or None)
        if name == "pav":
            return pav_k(profile, k)
        if name == "seq-plurality":
            tb = self.params[0] if self.params else NO_TIEBREAK
            return sequential_plurality(profile, k, tb)
        if name == "cstv":
            mode = self.params[0] if self.params else CSTVMode.PARALLEL
            return cstv(profile, k, mode)
        if name == "condorcet":
            found = condorcet_committees(profile, k)
            if not found:
                raise ScrutineerError("no weak Condorcet committee of this size")
            return CommitteeResult(found)
        raise ScrutineerError(f"unknown committee rule {name!r}")


COMMITTEE_RULES = ("best-plurality", "best-approval", "best-borda", "chco", "pav",
                   "seq-plurality", "cstv")


@dataclass
class CommitteeReport:
    axiom: str
    holds: bool
    witness: dict | None = None
    checked: int = 0


def check_committee_axiom(rule, axiom, n, m, k_max, profiles=None, budget=10**6):
    """Check STABLE or COMMITTEE_MONOTONIC for ``k`` up to ``k_max``.

    Committee monotonicity is read with both conditions quantified over
    every committee: each ``f_k`` winner extends to some ``f_{k+1}`` winner
    and each ``f_{k+1}`` winner contains some ``f_k`` winner.
    """
    axiom = axiom.upper()
    if axiom not in ("STABLE", "COMMITTEE_MONOTONIC"):
        raise ScrutineerError(f"unknown committee axiom {axiom!r}")
    if profiles is None:
        profiles = enumerate_profiles(n, m, budget=budget)
    k_max = min(k_max, m)
    checked = 0
    for prof in profiles:
        checked += 1
        if axiom == "STABLE":
            for k in range(1, k_max + 1):
                cc = condorcet_committees(prof, k)
                got = rule(prof, k)
                if cc and not got <= cc:
                    return CommitteeReport(axiom, False, {"profile": prof, "k": k,
                                                          "selected": got, "condorcet": cc}, checked)
        else:
            outputs = {k: rule(prof, k) for k in range(1, k_max + 1)}
            for k in range(1, k_max):
                small, large = outputs[k], outputs[k + 1]
                for c in small:
                    if not any(c < d for d in large):
                        return CommitteeReport(axiom, False, {"profile": prof, "k": k,
                                                              "committee": c, "larger": large}, checked)
                for d in large:
                    if not any(c < d for c in small):
                        return CommitteeReport(axiom, False, {"profile": prof, "k": k + 1,
                                                              "committee": d, "smaller": small}, checked)
    return CommitteeReport(axiom, True, None, checked)
