"""Pairwise majority comparisons, Condorcet winners and McGarvey profiles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Profile, ScrutineerError, default_labels


def net(profile, x, y):
    """Net preference for ``x`` over ``y``."""
    if x == y:
        raise ScrutineerError("net preference needs two distinct alternatives")
    s = profile.support_matrix
    return s[x][y] - s[y][x]


def net_matrix(profile):
    s = profile.support_matrix
    m = profile.m
    return [[s[x][y] - s[y][x] for y in range(m)] for x in range(m)]


@dataclass(frozen=True)
class Tournament:
    """A binary relation over ``range(m)`` given as a set of ordered pairs."""

    m: int
    beats: frozenset

    def __post_init__(self):
        object.__setattr__(self, "beats", frozenset(tuple(e) for e in self.beats))
        for x, y in self.beats:
            if not (0 <= x < self.m and 0 <= y < self.m):
                raise ScrutineerError(f"edge {(x, y)} outside 0..{self.m - 1}")

    def __contains__(self, edge):
        return tuple(edge) in self.beats

    def is_irreflexive(self):
        return all(x != y for x, y in self.beats)

    def is_complete(self):
        return all((x, y) in self.beats or (y, x) in self.beats
                   for x, y in itertools.combinations(range(self.m), 2))

    def is_strict(self):
        return self.is_irreflexive() and not any((y, x) in self.beats for x, y in self.beats)

    def out_degree(self, x):
        return sum(1 for a, _ in self.beats if a == x)

    def sources(self):
        """Alternatives with an edge to every other alternative."""
        return {x for x in range(self.m)
                if all((x, y) in self.beats for y in range(self.m) if y != x)}

    def edges(self):
        return sorted(self.beats)


def majority_graph(profile, weak=False):
    """Strict (net > 0) or weak (net >= 0) majority relation."""
    nm = net_matrix(profile)
    m = profile.m
    if weak:
        edges = {(x, y) for x in range(m) for y in range(m) if x != y and nm[x][y] >= 0}
    else:
        edges = {(x, y) for x in range(m) for y in range(m) if nm[x][y] > 0}
    return Tournament(m, frozenset(edges))


def condorcet_winner(profile, weak=False):
    """Set of (weak) Condorcet winners; at most one in the strict case."""
    nm = net_matrix(profile)
    m = profile.m
    if weak:
        return frozenset(x for x in range(m) if all(nm[x][y] >= 0 for y in range(m) if y != x))
    return frozenset(x for x in range(m) if all(nm[x][y] > 0 for y in range(m) if y != x))


def is_transitive(t):
    beats = t.beats
    for (x, y) in beats:
        for (y2, z) in beats:
            if y2 == y and x != z and (x, z) not in beats:
                return False
    return True


def mcgarvey_realize(t, labels=None):
    """A profile with two ballots per edge whose strict majority graph is ``t``."""
    if not t.is_irreflexive():
        raise ScrutineerError("tournament must be irreflexive")
    if not t.is_strict():
        raise ScrutineerError("tournament must be antisymmetric")
    if not t.is_complete():
        raise ScrutineerError("tournament must be complete")
    ballots = []
    if not t.beats:
        ballots = [tuple(range(t.m)), tuple(reversed(range(t.m)))]
    for x, y in t.edges():
        rest = [z for z in range(t.m) if z not in (x, y)]
        ballots.append(tuple([x, y] + rest))
        ballots.append(tuple(list(reversed(rest)) + [x, y]))
    labels = default_labels(t.m) if labels is None else tuple(labels)
    return Profile(labels, tuple(ballots))


def all_tournaments(m):
    """Every strict complete tournament on ``range(m)``."""
    pairs = list(itertools.combinations(range(m), 2))
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        yield Tournament(m, frozenset((x, y) if b == 0 else (y, x) for (x, y), b in zip(pairs, bits)))


def parse_tournament(text, labels=None):
    """Parse ``tournament: m`` (or ``tournament: a,b,c``) then one ``x>y`` line per edge."""
    header = None
    edges = []
    index = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            key, sep, rest = line.partition(":")
            if not sep or key.strip() != "tournament":
                raise ScrutineerError(f"line {lineno}: expected 'tournament: m' header")
            rest = rest.strip()
            if rest.isdigit():
                m = int(rest)
                header = tuple(labels) if labels else default_labels(m)
                if len(header) != m:
                    raise ScrutineerError(f"line {lineno}: label count does not match m")
            else:
                header = tuple(s.strip() for s in rest.split(","))
            index = {lab: k for k, lab in enumerate(header)}
            continue
        parts = [p.strip() for p in line.split(">")]
        if len(parts) != 2 or any(p not in index for p in parts):
            raise ScrutineerError(f"line {lineno}: expected an edge 'x>y' over known labels")
        edges.append((index[parts[0]], index[parts[1]]))
    if header is None:
        raise ScrutineerError("missing 'tournament:' header")
    return Tournament(len(header), frozenset(edges)), header
