"""Ballots, profiles, weak orders and the profile file format.

Alternatives are plain integers ``0..m-1``; their labels live on the
:class:`Profile`. A ballot is a tuple holding a permutation of
``range(m)``, most preferred first. Index order of the alternatives is the
canonical order used by every lexicographic tie-break in the package.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Ballot = tuple  # permutation of range(m), position 0 = top

LABEL_RE = re.compile(r"^[A-Za-z0-9_]+$")
DEFAULT_PROFILE_BUDGET = 10**7


class ScrutineerError(Exception):
    """Base class for domain and validation errors."""


class ProfileFormatError(ScrutineerError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(ScrutineerError):
    """Raised when a search would exceed its configured budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def default_labels(m):
    if m <= 26:
        return tuple("abcdefghijklmnopqrstuvwxyz"[:m])
    return tuple(f"x{i}" for i in range(m))


def all_ballots(m):
    """All linear orders over ``range(m)`` in lexicographic order."""
    return list(itertools.permutations(range(m)))


def check_ballot(ballot, m):
    if len(ballot) != m or sorted(ballot) != list(range(m)):
        raise ScrutineerError(f"not a linear order over {m} alternatives: {ballot!r}")


def rank_of(ballot, x):
    """1-based position of ``x`` in ``ballot``."""
    return ballot.index(x) + 1


def prefers(ballot, x, y):
    """True iff ``x`` is strictly above ``y`` in ``ballot``."""
    return ballot.index(x) < ballot.index(y)


def reverse(ballot):
    return tuple(reversed(ballot))


@dataclass(frozen=True)
class TieBreak:
    """``none`` keeps ties; ``lexicographic`` picks the minimum index."""

    mode: str = "none"

    def __post_init__(self):
        if self.mode not in ("none", "lexicographic"):
            raise ScrutineerError(f"unknown tie-break mode {self.mode!r}")

    def apply(self, winners):
        winners = frozenset(winners)
        if self.mode == "lexicographic" and winners:
            return frozenset([min(winners)])
        return winners


NO_TIEBREAK = TieBreak("none")
LEXICOGRAPHIC = TieBreak("lexicographic")


@dataclass(frozen=True)
class WeakOrder:
    """A total preorder as a sequence of tiers, best tier first."""

    tiers: tuple

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(frozenset(t) for t in self.tiers))
        seen = set()
        for tier in self.tiers:
            if not tier:
                raise ScrutineerError("weak order tiers must be nonempty")
            if seen & tier:
                raise ScrutineerError("weak order tiers must be disjoint")
            seen |= tier

    @classmethod
    def from_ballot(cls, ballot):
        return cls(tuple(frozenset([x]) for x in ballot))

    @cached_property
    def level(self):
        return {x: k for k, tier in enumerate(self.tiers) for x in tier}

    @property
    def alternatives(self):
        return frozenset(self.level)

    def weakly_prefers(self, x, y):
        return self.level[x] <= self.level[y]

    def strictly_prefers(self, x, y):
        return self.level[x] < self.level[y]

    def top(self):
        return self.tiers[0]

    def is_linear(self):
        return all(len(t) == 1 for t in self.tiers)

    def linearizations(self):
        """All linear orders refining this preorder (ties broken every way)."""
        parts = [itertools.permutations(sorted(t)) for t in self.tiers]
        for combo in itertools.product(*parts):
            yield tuple(x for part in combo for x in part)

    def render(self, labels):
        return " > ".join(
            "{" + ",".join(labels[x] for x in sorted(t)) + "}" if len(t) > 1 else labels[next(iter(t))]
            for t in self.tiers
        )


def all_weak_orders(m):
    """Every total preorder over ``range(m)`` (ordered set partitions)."""
    items = list(range(m))

    def rec(remaining):
        if not remaining:
            yield ()
            return
        rest = sorted(remaining)
        for size in range(1, len(rest) + 1):
            for first in itertools.combinations(rest, size):
                for tail in rec(remaining - set(first)):
                    yield (frozenset(first),) + tail

    return [WeakOrder(t) for t in rec(set(items))]


@dataclass(frozen=True)
class Profile:
    """An indexed tuple of ballots over labelled alternatives."""

    labels: tuple
    ballots: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        ballots = tuple(tuple(b) for b in self.ballots)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ballots", ballots)
        if len(labels) < 1:
            raise ScrutineerError("a profile needs at least one alternative")
        if len(set(labels)) != len(labels):
            raise ScrutineerError("alternative labels must be unique")
        if not ballots:
            raise ScrutineerError("a profile needs at least one ballot")
        m = len(labels)
        for b in ballots:
            check_ballot(b, m)

    @classmethod
    def from_orders(cls, orders, labels=None):
        """Build from label strings such as ``["abc", "bca"]`` or index tuples."""
        orders = list(orders)
        if labels is None:
            first = orders[0]
            if isinstance(first, str):
                labels = tuple(sorted(first))
            else:
                labels = default_labels(len(first))
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        ballots = []
        for o in orders:
            if isinstance(o, str):
                o = list(o) if all(len(lab) == 1 for lab in labels) else o.split(">")
                ballots.append(tuple(index[x] for x in o))
            else:
                ballots.append(tuple(o))
        return cls(labels, tuple(ballots))

    @classmethod
    def from_counts(cls, labels, rows):
        """``rows`` is a sequence of ``(count, ballot)`` pairs, ballots as strings or tuples."""
        orders = []
        for count, ballot in rows:
            orders.extend([ballot] * count)
        return cls.from_orders(orders, labels)

    @property
    def n(self):
        return len(self.ballots)

    @property
    def m(self):
        return len(self.labels)

    @property
    def alternatives(self):
        return range(len(self.labels))

    def label(self, x):
        return self.labels[x]

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ScrutineerError(f"unknown alternative {label!r}") from None

    def top(self, i):
        return self.ballots[i][0]

    def tops(self):
        return [b[0] for b in self.ballots]

    @cached_property
    def support_matrix(self):
        """``support_matrix[x][y]`` = number of voters ranking x above y."""
        m = self.m
        mat = [[0] * m for _ in range(m)]
        for ballot, count in Counter(self.ballots).items():
            for i, x in enumerate(ballot):
                row = mat[x]
                for y in ballot[i + 1:]:
                    row[y] += count
        return tuple(tuple(r) for r in mat)

    def plurality_scores(self):
        scores = [0] * self.m
        for b in self.ballots:
            scores[b[0]] += 1
        return scores

    def with_ballot(self, i, ballot):
        ballots = list(self.ballots)
        ballots[i] = tuple(ballot)
        return Profile(self.labels, tuple(ballots))

    def without_voter(self, i):
        ballots = self.ballots[:i] + self.ballots[i + 1:]
        return Profile(self.labels, ballots)

    def ballot_str(self, ballot):
        return ">".join(self.labels[x] for x in ballot)

    def voters_preferring(self, x, y):
        """``N^{xy}``: frozenset of voters strictly preferring x to y."""
        return frozenset(i for i, b in enumerate(self.ballots) if prefers(b, x, y))

    def __repr__(self):
        body = ", ".join("".join(self.labels[x] for x in b) if all(len(l) == 1 for l in self.labels)
                         else self.ballot_str(b) for b in self.ballots[:8])
        more = "" if self.n <= 8 else f", ... ({self.n} voters)"
        return f"Profile<{body}{more}>"


def support(profile, x, y):
    """Number of voters strictly preferring ``x`` to ``y``."""
    if x == y:
        raise ScrutineerError("support needs two distinct alternatives")
    return profile.support_matrix[x][y]


def restrict(profile, keep):
    """Restrict every ballot to ``keep``, preserving relative order and labels."""
    keep = set(keep)
    if not keep:
        raise ScrutineerError("cannot restrict a profile to the empty set")
    if not keep <= set(profile.alternatives):
        raise ScrutineerError("restriction set contains unknown alternatives")
    order = sorted(keep)
    new_index = {x: k for k, x in enumerate(order)}
    labels = tuple(profile.labels[x] for x in order)
    ballots = tuple(tuple(new_index[x] for x in b if x in keep) for b in profile.ballots)
    return Profile(labels, ballots)


def restriction_map(profile, keep):
    """Return ``(restricted_profile, back)`` where ``back[k]`` is the original index."""
    order = sorted(set(keep))
    return restrict(profile, order), order


def _check_bijection(mapping, size, what):
    if sorted(mapping) != list(range(size)):
        raise ScrutineerError(f"{what} permutation is not a bijection of 0..{size - 1}")


def permute_voters(profile, pi):
    """Ballot ``i`` of the output is ballot ``pi[i]`` of the input."""
    pi = list(pi)
    _check_bijection(pi, profile.n, "voter")
    return Profile(profile.labels, tuple(profile.ballots[pi[i]] for i in range(profile.n)))


def permute_alternatives(profile, rho):
    """Replace every alternative ``x`` by ``rho[x]`` in place."""
    rho = list(rho)
    _check_bijection(rho, profile.m, "alternative")
    return Profile(profile.labels, tuple(tuple(rho[x] for x in b) for b in profile.ballots))


def inverse(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def profile_space_size(n, m):
    return math.factorial(m) ** n


def enumerate_profiles(n, m, labels=None, budget=DEFAULT_PROFILE_BUDGET, ballots=None):
    """Yield all profiles of ``n`` voters, lexicographically by ballot index tuple.

    ``ballots`` restricts each voter to a sub-domain (e.g. single-peaked orders).
    """
    ballots = all_ballots(m) if ballots is None else list(ballots)
    total = len(ballots) ** n
    if total > budget:
        raise BudgetExceeded(f"{total} profiles exceed the budget of {budget}")
    labels = default_labels(m) if labels is None else tuple(labels)
    for combo in itertools.product(ballots, repeat=n):
        yield Profile(labels, combo)


# --- Profile file format -------------------------------------------------

def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_profile(text):
    labels = None
    ballots = []
    index = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if labels is None:
            key, sep, rest = line.partition(":")
            if not sep or key.strip() != "alternatives":
                raise ProfileFormatError("expected 'alternatives: l1,l2,...' header", lineno)
            labels = [lab.strip() for lab in rest.split(",")]
            for lab in labels:
                if not LABEL_RE.match(lab):
                    raise ProfileFormatError(f"invalid label {lab!r}", lineno)
            if len(set(labels)) != len(labels):
                raise ProfileFormatError("duplicate alternative in header", lineno)
            index = {lab: k for k, lab in enumerate(labels)}
            continue
        count_str, sep, order = line.partition(":")
        if not sep:
            raise ProfileFormatError("expected 'COUNT: x>y>...'", lineno)
        count_str = count_str.strip()
        if not count_str.isdigit() or int(count_str) <= 0:
            raise ProfileFormatError(f"count must be a positive integer, got {count_str!r}", lineno)
        names = [x.strip() for x in order.split(">")]
        ballot = []
        for name in names:
            if name not in index:
                raise ProfileFormatError(f"unknown alternative {name!r}", lineno)
            if index[name] in ballot:
                raise ProfileFormatError(f"duplicate alternative {name!r} in ballot", lineno)
            ballot.append(index[name])
        if len(ballot) != len(labels):
            missing = [lab for lab in labels if index[lab] not in ballot]
            raise ProfileFormatError(f"ballot is missing {','.join(missing)}", lineno)
        ballots.extend([tuple(ballot)] * int(count_str))
    if labels is None:
        raise ProfileFormatError("missing 'alternatives:' header")
    if not ballots:
        raise ProfileFormatError("profile has no ballots")
    return Profile(tuple(labels), tuple(ballots))


def render_profile(profile, runs=False):
    """Canonical grouped form; ``runs=True`` keeps voter order (consecutive runs)."""
    lines = ["alternatives: " + ",".join(profile.labels)]
    if runs:
        groups = [(b, len(list(g))) for b, g in itertools.groupby(profile.ballots)]
    else:
        groups = list(Counter(profile.ballots).items())  # insertion = first occurrence
    for ballot, count in groups:
        lines.append(f"{count}: {profile.ballot_str(ballot)}")
    return "\n".join(lines) + "\n"


def grouped(profile):
    """Distinct ballots with counts, in first-occurrence order."""
    return list(Counter(profile.ballots).items())


def parse_ballot(text, labels):
    index = {lab: k for k, lab in enumerate(labels)}
    parts = [p.strip() for p in text.split(">")] if ">" in text else list(text)
    try:
        ballot = tuple(index[p] for p in parts)
    except KeyError as exc:
        raise ScrutineerError(f"unknown alternative {exc.args[0]!r}") from None
    check_ballot(ballot, len(labels))
    return ballot


def coalitions(n):
    """All subsets of ``range(n)`` as frozensets, by size then lexicographically."""
    out = []
    for size in range(n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(n), size))
    return out


def ensure_profiles(profiles: Iterable[Profile]) -> Sequence[Profile]:
    return profiles if isinstance(profiles, (list, tuple)) else list(profiles)
