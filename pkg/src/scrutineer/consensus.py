"""Ballot distances and closest-consensus characterisations of rules."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .core import BudgetExceeded, Profile, ScrutineerError, all_ballots
from .tournaments import condorcet_winner


class ConsensusClass(enum.Enum):
    UNANIMOUS = "u"
    STRONG_UNANIMOUS = "s"
    CONDORCET = "c"


class DistanceId(enum.Enum):
    SWAP = "swap"
    DISCRETE = "discrete"


def _check_sizes(b1, b2):
    if len(b1) != len(b2):
        raise ScrutineerError("ballots over different numbers of alternatives")


def swap_distance(b1, b2):
    """Number of pairs ranked in opposite order (Kendall tau)."""
    _check_sizes(b1, b2)
    pos = {x: k for k, x in enumerate(b2)}
    seq = [pos[x] for x in b1]
    return sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])


def discrete_distance(b1, b2):
    _check_sizes(b1, b2)
    return 0 if tuple(b1) == tuple(b2) else 1


DISTANCES = {DistanceId.SWAP: swap_distance, DistanceId.DISCRETE: discrete_distance}


def kemeny_distance(order, profile):
    if len(order) != profile.m:
        raise ScrutineerError("order and profile disagree on the number of alternatives")
    return sum(swap_distance(b, order) for b in profile.ballots)


def profile_distance(p1, p2, distance=DistanceId.SWAP):
    d = DISTANCES[DistanceId(distance)]
    if p1.n != p2.n:
        raise ScrutineerError("profiles have different numbers of voters")
    return sum(d(a, b) for a, b in zip(p1.ballots, p2.ballots))


def move_to_top(ballot, x):
    return (x,) + tuple(y for y in ballot if y != x)


def in_class(profile, cls):
    cls = ConsensusClass(cls)
    if cls is ConsensusClass.UNANIMOUS:
        return len(set(profile.tops())) == 1
    if cls is ConsensusClass.STRONG_UNANIMOUS:
        return len(set(profile.ballots)) == 1
    return bool(condorcet_winner(profile))


@dataclass
class ConsensusResult:
    distance: int
    profiles: list  # list of (Profile, winner)
    winners: frozenset
    canonical: bool  # True if minimizers are reported up to a canonical completion


def _unanimous(profile, dist):
    costs = {}
    for x in profile.alternatives:
        if dist is DistanceId.SWAP:
            costs[x] = sum(b.index(x) for b in profile.ballots)
        else:
            costs[x] = sum(1 for b in profile.ballots if b[0] != x)
    best = min(costs.values())
    winners = frozenset(x for x, c in costs.items() if c == best)
    found = []
    for x in sorted(winners):
        q = Profile(profile.labels, tuple(move_to_top(b, x) for b in profile.ballots))
        found.append((q, x))
    return ConsensusResult(best, found, winners, dist is DistanceId.DISCRETE)


def _strong(profile, dist, max_m):
    if profile.m > max_m:
        raise BudgetExceeded(f"strong-unanimity search enumerates {profile.m}! orders")
    d = DISTANCES[dist]
    best, orders = None, []
    for order in all_ballots(profile.m):
        cost = sum(d(b, order) for b in profile.ballots)
        if best is None or cost < best:
            best, orders = cost, [order]
        elif cost == best:
            orders.append(order)
    found = [(Profile(profile.labels, (o,) * profile.n), o[0]) for o in orders]
    return ConsensusResult(best, found, frozenset(o[0] for o in orders), False)


def _condorcet_discrete(profile, budget):
    ballots = all_ballots(profile.m)
    examined = 0
    for changed in range(profile.n + 1):
        found = []
        for voters in itertools.combinations(range(profile.n), changed):
            options = [[b for b in ballots if b != profile.ballots[i]] for i in voters]
            for repl in itertools.product(*options):
                examined += 1
                if examined > budget:
                    raise BudgetExceeded(f"condorcet/discrete search exceeded {budget} profiles")
                new = list(profile.ballots)
                for i, b in zip(voters, repl):
                    new[i] = b
                q = Profile(profile.labels, tuple(new))
                cw = condorcet_winner(q)
                if cw:
                    found.append((q, next(iter(cw))))
        if found:
            return ConsensusResult(changed, found, frozenset(x for _, x in found), False)
    raise ScrutineerError("no Condorcet profile exists")  # unreachable for n >= 1


def closest_consensus(profile, cls, distance, budget=10**6, max_m=8):
    """All minimizing consensus profiles in ``cls`` and the winners read off them."""
    cls = ConsensusClass(cls)
    distance = DistanceId(distance)
    if cls is ConsensusClass.UNANIMOUS:
        return _unanimous(profile, distance)
    if cls is ConsensusClass.STRONG_UNANIMOUS:
        return _strong(profile, distance, max_m)
    if distance is DistanceId.DISCRETE:
        return _condorcet_discrete(profile, budget)
    from .rules import dodgson_search

    B, found = dodgson_search(profile, budget=budget)
    pairs = [(Profile(profile.labels, tuple(b)), x) for b, x in found]
    return ConsensusResult(B, pairs, frozenset(x for _, x in found), False)
