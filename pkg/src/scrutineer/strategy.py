"""Manipulation, single-peaked domains and iterative voting games."""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    BudgetExceeded,
    Profile,
    ScrutineerError,
    TieBreak,
    all_ballots,
    default_labels,
    enumerate_profiles,
    prefers,
)
from .rules import (
    RuleHandle,
    is_single_peaked,
    is_single_peaked_ballot,
    median_rule,
    positional_scores,
)
from .tournaments import condorcet_winner, is_transitive, majority_graph


@dataclass(frozen=True)
class ManipulationWitness:
    voter: int
    truthful: tuple
    strategic: tuple
    outcome_truthful: int
    outcome_strategic: int


def _resolute(rule, tiebreak=None):
    if tiebreak is not None:
        rule = rule.with_tiebreak(tiebreak)
    return rule


def _single(rule, profile):
    out = rule(profile)
    if len(out) != 1:
        raise ScrutineerError(
            f"rule {rule.spec()} is not resolute on this profile; attach a tie-break")
    return next(iter(out))


def manipulations(rule, profile, voter, tiebreak=None):
    """Every successful manipulation by ``voter``, in lexicographic ballot order."""
    rule = _resolute(rule, tiebreak)
    truthful = profile.ballots[voter]
    honest = _single(rule, profile)
    out = []
    for b in all_ballots(profile.m):
        if b == truthful:
            continue
        got = _single(rule, profile.with_ballot(voter, b))
        if prefers(truthful, got, honest):
            out.append(ManipulationWitness(voter, truthful, b, honest, got))
    return out


def find_manipulation(rule, profile, voter, tiebreak=None):
    """The manipulation with the lexicographically least strategic ballot, or ``None``."""
    if not 0 <= voter < profile.n:
        raise ScrutineerError(f"voter index {voter} out of range")
    rule = _resolute(rule, tiebreak)
    truthful = profile.ballots[voter]
    honest = _single(rule, profile)
    for b in all_ballots(profile.m):
        if b == truthful:
            continue
        got = _single(rule, profile.with_ballot(voter, b))
        if prefers(truthful, got, honest):
            return ManipulationWitness(voter, truthful, b, honest, got)
    return None


def greedy_manipulation(rule, rest, x, truthful=None):
    """Build a ballot electing ``x`` one position at a time.

    ``rest`` holds every ballot except the manipulator's. The rule must be a
    positional scoring rule resolved lexicographically. Returns ``None`` when
    no unplaced alternative can take the next position without beating ``x``.
    """
    weights = rule.score_vector(rest.m)
    if weights is None or rule.tiebreak.mode != "lexicographic":
        raise ScrutineerError("greedy manipulation needs a positional scoring rule with lex tie-break")
    base = positional_scores(rest, weights)
    x_score = base[x] + weights[0]
    ballot = [x]
    unplaced = [y for y in rest.alternatives if y != x]
    for pos in range(1, rest.m):
        for y in unplaced:
            s = base[y] + weights[pos]
            if s < x_score or (s == x_score and x < y):
                ballot.append(y)
                unplaced.remove(y)
                break
        else:
            return None
    return tuple(ballot)


def with_voter(rest, ballot, voter=None):
    """Insert ``ballot`` at position ``voter`` (default last) of ``rest``."""
    ballots = list(rest.ballots)
    ballots.insert(len(ballots) if voter is None else voter, tuple(ballot))
    return Profile(rest.labels, tuple(ballots))


@dataclass
class InformationSet:
    voter: int
    profiles: list

    def __post_init__(self):
        if not self.profiles:
            raise ScrutineerError("an information set must be nonempty")
        own = {p.ballots[self.voter] for p in self.profiles}
        if len(own) != 1:
            raise ScrutineerError("profiles in an information set must agree on the voter's ballot")

    @property
    def truthful(self):
        return self.profiles[0].ballots[self.voter]


def full_information_set(profile, voter):
    """All completions of the voter's ballot (the maximally uninformed case)."""
    own = profile.ballots[voter]
    profiles = []
    for others in itertools.product(all_ballots(profile.m), repeat=profile.n - 1):
        ballots = list(others)
        ballots.insert(voter, own)
        profiles.append(Profile(profile.labels, tuple(ballots)))
    return InformationSet(voter, profiles)


def dominating_manipulation(rule, info, tiebreak=None, budget=10**7):
    """A ballot weakly better on every profile of ``info`` and strictly on one."""
    rule = _resolute(rule, tiebreak)
    m = info.profiles[0].m
    if len(info.profiles) * len(all_ballots(m)) > budget:
        raise BudgetExceeded("information set times ballots exceeds the budget")
    truthful = info.truthful
    v = info.voter
    honest = [_single(rule, p) for p in info.profiles]
    for b in all_ballots(m):
        if b == truthful:
            continue
        strict = False
        for p, h in zip(info.profiles, honest):
            got = _single(rule, p.with_ballot(v, b))
            if prefers(truthful, h, got):
                break
            if got != h:
                strict = True
        else:
            if strict:
                return b
    return None


# --- Single-peakedness ---------------------------------------------------

def single_peaked_axes(profile, max_m=8):
    if profile.m > max_m:
        raise BudgetExceeded(f"axis scan over {profile.m}! orders exceeds the budget")
    return [axis for axis in all_ballots(profile.m) if is_single_peaked(profile, axis)]


def single_peaked_ballots(axis):
    return [b for b in all_ballots(len(axis)) if is_single_peaked_ballot(b, axis)]


@dataclass
class BlackReport:
    n: int
    m: int
    profiles: int = 0
    transitive_failures: list = field(default_factory=list)
    strict_transitive_failures: list = field(default_factory=list)
    median_failures: list = field(default_factory=list)
    manipulations: list = field(default_factory=list)
    manipulation_checked: bool = False

    @property
    def ok(self):
        return not (self.transitive_failures or self.median_failures or self.manipulations)


def black_suite(n, m, budget=10**6):
    """Check Black's theorem on every profile single-peaked on the canonical axis.

    Odd ``n``: strict majority relation transitive, median equal to the
    Condorcet winner and no voter gains from another single-peaked ballot.
    Even ``n``: weak majority relation transitive and the median set
    contained in the weak Condorcet winners. The strict majority relation
    is checked for transitivity at every ``n`` and reported separately.
    """
    axis = tuple(range(m))
    domain = single_peaked_ballots(axis)
    labels = default_labels(m)
    report = BlackReport(n, m, manipulation_checked=(n % 2 == 1))
    for prof in enumerate_profiles(n, m, labels, budget=budget, ballots=domain):
        report.profiles += 1
        odd = n % 2 == 1
        strict_ok = is_transitive(majority_graph(prof))
        if not strict_ok:
            report.strict_transitive_failures.append(prof)
        if not (strict_ok if odd else is_transitive(majority_graph(prof, weak=True))):
            report.transitive_failures.append(prof)
        med = median_rule(prof, axis).winners
        if odd:
            if med != condorcet_winner(prof):
                report.median_failures.append(prof)
        elif not med <= condorcet_winner(prof, weak=True):
            report.median_failures.append(prof)
        if odd:
            (honest,) = med
            for i, truthful in enumerate(prof.ballots):
                for b in domain:
                    if b == truthful:
                        continue
                    (got,) = median_rule(prof.with_ballot(i, b), axis).winners
                    if prefers(truthful, got, honest):
                        report.manipulations.append(ManipulationWitness(i, truthful, b, honest, got))
    return report


# --- Voting games --------------------------------------------------------

class StrategySpace(enum.Enum):
    FULL_ORDERS = "full"
    TOP_ONLY = "top"


@dataclass
class VotingGame:
    """A rule played by voters with true preferences ``true_profile``.

    In the top-only space a strategy is an alternative ``x``, played as the
    voter's truthful ballot with ``x`` moved to the top.
    """

    true_profile: Profile
    rule: RuleHandle
    space: StrategySpace = StrategySpace.FULL_ORDERS

    def __post_init__(self):
        self.space = StrategySpace(self.space)
        if self.rule.tiebreak.mode != "lexicographic" and self.rule.func is None \
                and self.rule.name not in ("dictatorship", "constant", "table"):
            self.rule = self.rule.lex
        self._cache = {}

    def strategies(self):
        if self.space is StrategySpace.TOP_ONLY:
            return list(self.true_profile.alternatives)
        return all_ballots(self.true_profile.m)

    def ballot(self, voter, strategy):
        if self.space is StrategySpace.TOP_ONLY:
            truthful = self.true_profile.ballots[voter]
            return (strategy,) + tuple(y for y in truthful if y != strategy)
        return tuple(strategy)

    def truthful(self):
        if self.space is StrategySpace.TOP_ONLY:
            return tuple(b[0] for b in self.true_profile.ballots)
        return tuple(self.true_profile.ballots)

    def played(self, state):
        return Profile(self.true_profile.labels,
                       tuple(self.ballot(i, s) for i, s in enumerate(state)))

    def outcome(self, state):
        if state not in self._cache:
            self._cache[state] = _single(self.rule, self.played(state))
        return self._cache[state]

    def deviations(self, state, best_only=False):
        """Profitable unilateral deviations from ``state`` as ``(voter, new_state)``."""
        out = []
        current = self.outcome(state)
        for i, truthful in enumerate(self.true_profile.ballots):
            options = []
            for s in self.strategies():
                if s == state[i]:
                    continue
                nxt = state[:i] + (s,) + state[i + 1:]
                got = self.outcome(nxt)
                if prefers(truthful, got, current):
                    options.append((truthful.index(got), nxt))
            if best_only and options:
                top = min(r for r, _ in options)
                options = [o for o in options if o[0] == top]
            out.extend((i, nxt) for _, nxt in options)
        return out


@dataclass
class ResponseGraph:
    nodes: list
    edges: dict
    sinks: list


def best_response_graph(game, best_only=False, budget=10**6):
    """Profitable-deviation graph over all strategy profiles; sinks are the Nash equilibria."""
    size = len(game.strategies()) ** game.true_profile.n
    if size > budget:
        raise BudgetExceeded(f"{size} strategy profiles exceed the budget of {budget}")
    nodes = list(itertools.product(game.strategies(), repeat=game.true_profile.n))
    edges = {s: [nxt for _, nxt in game.deviations(s, best_only)] for s in nodes}
    sinks = [s for s in nodes if not edges[s]]
    return ResponseGraph(nodes, edges, sinks)


def reachable_equilibria(game, start=None, best_only=False):
    """Sinks reachable from ``start`` (default: truthful play), found breadth first."""
    start = game.truthful() if start is None else start
    seen = {start}
    queue = deque([start])
    sinks = []
    while queue:
        s = queue.popleft()
        nxt = [t for _, t in game.deviations(s, best_only)]
        if not nxt:
            sinks.append(s)
        for t in nxt:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return sinks


@dataclass
class PoAResult:
    value: Fraction
    true_profile: Profile | None
    equilibrium: Profile | None
    profiles: int
    skipped_zero: int


def dynamic_poa(rule, n, m, space=StrategySpace.TOP_ONLY, best_only=False, budget=10**6,
                convention="literal"):
    """``min_P min_{P' in NE_P} s(f(P), P) / s(f(P'), P')`` for a positional rule.

    ``convention="true-score"`` instead scores both outcomes on the true
    profile, ``s(f(P'), P) / s(f(P), P)``, the usual reading in the
    iterative voting literature.
    """
    if convention not in ("literal", "true-score"):
        raise ScrutineerError(f"unknown price-of-anarchy convention {convention!r}")
    rule = rule if rule.tiebreak.mode == "lexicographic" else rule.lex
    weights = rule.score_vector(m)
    if weights is None:
        raise ScrutineerError("price of anarchy is defined for positional scoring rules")
    best = None
    witness = (None, None)
    count = skipped = 0
    for prof in enumerate_profiles(n, m, budget=budget):
        count += 1
        game = VotingGame(prof, rule, space)
        winner = game.outcome(game.truthful())
        true_scores = positional_scores(prof, weights)
        for eq in reachable_equilibria(game, best_only=best_only):
            played = game.played(eq)
            if convention == "literal":
                num = true_scores[winner]
                den = positional_scores(played, weights)[game.outcome(eq)]
            else:
                num, den = true_scores[game.outcome(eq)], true_scores[winner]
            if den == 0:
                skipped += 1
                continue
            ratio = Fraction(num) / den
            if best is None or ratio < best:
                best, witness = ratio, (prof, played)
    return PoAResult(best, witness[0], witness[1], count, skipped)
