"""Single-winner social choice functions and rule handles.

Every rule returns a :class:`ChoiceResult` whose ``winners`` set is never
empty. Ties are kept unless a :class:`~scrutineer.core.TieBreak` is applied
with :func:`resolve` (or attached to a :class:`RuleHandle`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import (
    LEXICOGRAPHIC,
    NO_TIEBREAK,
    Profile,
    ScrutineerError,
    BudgetExceeded,
    TieBreak,
    all_ballots,
    restrict,
)
from .tournaments import condorcet_winner, net_matrix


@dataclass
class ChoiceResult:
    winners: frozenset
    scores: dict | None = None
    trace: list | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.winners = frozenset(self.winners)
        if not self.winners:
            raise ScrutineerError("a social choice must be nonempty")


def resolve(result, tiebreak):
    winners = result.winners if isinstance(result, ChoiceResult) else frozenset(result)
    return tiebreak.apply(winners)


def _argmax(scores):
    best = max(scores.values())
    return frozenset(x for x, s in scores.items() if s == best)


# --- Score vectors -------------------------------------------------------

def borda_vector(m):
    return tuple(Fraction(m - 1 - k) for k in range(m))


def veto_vector(m):
    return tuple(Fraction(1 if k < m - 1 else 0) for k in range(m))


def k_approval_vector(m, k):
    if not 1 <= k <= m:
        raise ScrutineerError(f"k-approval needs 1 <= k <= m, got k={k}, m={m}")
    return tuple(Fraction(1 if j < k else 0) for j in range(m))


def plurality_vector(m):
    return k_approval_vector(m, 1)


def positional_scores(profile, weights):
    weights = tuple(Fraction(w) for w in weights)
    if len(weights) != profile.m:
        raise ScrutineerError(f"score vector has length {len(weights)}, expected {profile.m}")
    scores = {x: Fraction(0) for x in profile.alternatives}
    for ballot in profile.ballots:
        for pos, x in enumerate(ballot):
            scores[x] += weights[pos]
    return scores


# --- Rules ---------------------------------------------------------------

def plurality(profile):
    counts = profile.plurality_scores()
    scores = dict(enumerate(counts))
    return ChoiceResult(_argmax(scores), scores)


def quota_rule(profile, q):
    if profile.m != 2:
        raise ScrutineerError("the quota rule is defined for two alternatives")
    if not 1 <= q <= profile.n + 1:
        raise ScrutineerError(f"quota must lie in 1..{profile.n + 1}")
    counts = profile.plurality_scores()
    winners = frozenset(x for x in range(2) if counts[x] >= q)
    return ChoiceResult(winners or frozenset(range(2)), dict(enumerate(counts)))


def dictatorship(profile, i):
    if not 0 <= i < profile.n:
        raise ScrutineerError(f"voter index {i} out of range 0..{profile.n - 1}")
    return ChoiceResult(frozenset([profile.ballots[i][0]]))


def constant_rule(profile, x):
    if not 0 <= x < profile.m:
        raise ScrutineerError(f"alternative index {x} out of range")
    return ChoiceResult(frozenset([x]))


def condorcet_rule(profile):
    cw = condorcet_winner(profile)
    return ChoiceResult(cw or frozenset(profile.alternatives))


def copeland(profile):
    nm = net_matrix(profile)
    m = profile.m
    scores = {x: sum((nm[x][y] > 0) - (nm[x][y] < 0) for y in range(m) if y != x) for x in range(m)}
    return ChoiceResult(_argmax(scores), scores)


def positional(profile, weights):
    scores = positional_scores(profile, weights)
    return ChoiceResult(_argmax(scores), scores)


def borda(profile):
    return positional(profile, borda_vector(profile.m))


def symmetric_borda(profile):
    nm = net_matrix(profile)
    scores = {x: sum(nm[x]) for x in profile.alternatives}
    return ChoiceResult(_argmax(scores), scores)


def _restricted_plurality(profile, keep):
    """Plurality scores within ``keep`` (original indices)."""
    scores = {x: 0 for x in keep}
    for ballot in profile.ballots:
        for x in ballot:
            if x in scores:
                scores[x] += 1
                break
    return scores


def plurality_runoff(profile):
    n = profile.n
    first = _restricted_plurality(profile, profile.alternatives)
    trace = [{"round": 1, "scores": dict(first)}]
    leaders = [x for x, s in first.items() if 2 * s > n]
    if leaders:
        trace[0]["eliminated"] = sorted(set(profile.alternatives) - set(leaders))
        return ChoiceResult(frozenset(leaders), first, trace)
    levels = sorted(set(first.values()), reverse=True)
    top2 = []
    for level in levels:
        top2.extend(x for x in profile.alternatives if first[x] == level)
        if len(top2) >= 2:
            break
    top2 = sorted(top2)
    trace[0]["eliminated"] = sorted(set(profile.alternatives) - set(top2))
    second = _restricted_plurality(profile, top2)
    trace.append({"round": 2, "scores": dict(second)})
    return ChoiceResult(_argmax(second), second, trace)


def stv_sigma(profile, remaining):
    """One application of the set transformer: drop all lowest scorers."""
    scores = _restricted_plurality(profile, remaining)
    low = min(scores.values())
    return [x for x in remaining if scores[x] != low], scores


def stv(profile):
    remaining = list(profile.alternatives)
    trace = []
    while True:
        nxt, scores = stv_sigma(profile, remaining)
        trace.append({
            "round": len(trace) + 1,
            "scores": scores,
            "eliminated": sorted(set(remaining) - set(nxt)),
        })
        if not nxt:
            return ChoiceResult(frozenset(remaining), None, trace)
        remaining = nxt


def _pair_positions(ballot):
    pos = [0] * len(ballot)
    for k, x in enumerate(ballot):
        pos[x] = k
    return pos


def kemeny(profile, max_m=8):
    m = profile.m
    if m > max_m:
        raise BudgetExceeded(f"kemeny enumerates {m}! orders; raise max_m above {max_m}")
    s = profile.support_matrix
    best = None
    orders = []
    for order in itertools.permutations(range(m)):
        # disagreements with ballots = voters ranking a later item above an earlier one
        dist = 0
        for i in range(m):
            for j in range(i + 1, m):
                dist += s[order[j]][order[i]]
        if best is None or dist < best:
            best, orders = dist, [order]
        elif dist == best:
            orders.append(order)
    winners = frozenset(o[0] for o in orders)
    return ChoiceResult(winners, None, None, {"orders": orders, "distance": best})


def _has_strict_cw(ballots, m):
    n = len(ballots)
    positions = [_pair_positions(b) for b in ballots]
    for x in range(m):
        if all(2 * sum(1 for p in positions if p[x] < p[y]) > n for y in range(m) if y != x):
            return x
    return None


def ballots_by_distance(ballot):
    """Map swap distance d to all orders at distance d from ``ballot``."""
    from .consensus import swap_distance

    out = {}
    for other in all_ballots(len(ballot)):
        out.setdefault(swap_distance(ballot, other), []).append(other)
    return out


def _compositions(total, parts, cap):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def condorcet_profiles_at(profile, budget_b):
    """Yield ``(ballots, cw)`` for profiles at total swap distance ``budget_b`` with a strict CW."""
    m = profile.m
    cap = m * (m - 1) // 2
    layers = {}
    for b in set(profile.ballots):
        layers[b] = ballots_by_distance(b)
    per_voter = [layers[b] for b in profile.ballots]
    for comp in _compositions(budget_b, profile.n, cap):
        choices = [per_voter[i].get(d, []) for i, d in enumerate(comp)]
        for ballots in itertools.product(*choices):
            cw = _has_strict_cw(ballots, m)
            if cw is not None:
                yield ballots, cw


def dodgson_search(profile, max_b=None, budget=10**6):
    """Iterative deepening over the total number of adjacent swaps.

    Returns ``(B, [(ballots, cw), ...])`` for the first budget ``B`` at which
    some profile has a strict Condorcet winner.
    """
    m = profile.m
    limit = profile.n * m * (m - 1) // 2 if max_b is None else max_b
    examined = 0
    cap = m * (m - 1) // 2
    layer_sizes = {}
    for b in set(profile.ballots):
        layer_sizes[b] = {d: len(v) for d, v in ballots_by_distance(b).items()}
    for B in range(limit + 1):
        # count the candidates at this depth before touching them
        for comp in _compositions(B, profile.n, cap):
            examined += math.prod(layer_sizes[b].get(d, 0) for b, d in zip(profile.ballots, comp))
        if examined > budget:
            raise BudgetExceeded(f"dodgson search exceeded {budget} profiles at B={B}", partial=B)
        found = list(condorcet_profiles_at(profile, B))
        if found:
            return B, found
    raise BudgetExceeded(f"no Condorcet profile within B <= {limit}", partial=limit)


def dodgson(profile, max_b=None, budget=10**6):
    B, found = dodgson_search(profile, max_b, budget)
    winners = frozenset(cw for _, cw in found)
    return ChoiceResult(winners, None, None, {"distance": B, "profiles": len(found)})


def odd_rule(profile):
    if profile.m != 2:
        raise ScrutineerError("the odd rule is defined for two alternatives")
    s = profile.support_matrix[0][1]
    return ChoiceResult(frozenset([0] if s % 2 == 1 else [1]), {0: s, 1: profile.n - s})


def is_single_peaked_ballot(ballot, axis):
    """Ballot declines strictly on both sides of its peak along ``axis``."""
    where = {x: k for k, x in enumerate(axis)}
    peak = where[ballot[0]]
    lo = hi = peak
    for x in ballot[1:]:
        p = where[x]
        if p == lo - 1:
            lo = p
        elif p == hi + 1:
            hi = p
        else:
            return False
    return True


def is_single_peaked(profile, axis):
    return all(is_single_peaked_ballot(b, axis) for b in profile.ballots)


def _resolve_axis(profile, axis):
    axis = tuple(axis)
    if all(isinstance(a, str) for a in axis):
        axis = tuple(profile.index(a) for a in axis)
    if sorted(axis) != list(profile.alternatives):
        raise ScrutineerError("axis must order every alternative exactly once")
    return axis


def median_rule(profile, axis):
    axis = _resolve_axis(profile, axis)
    if not is_single_peaked(profile, axis):
        raise ScrutineerError("profile is not single-peaked with respect to the axis")
    where = {x: k for k, x in enumerate(axis)}
    peaks = sorted(profile.tops(), key=where.__getitem__)
    n = profile.n
    if n % 2 == 1:
        return ChoiceResult(frozenset([peaks[n // 2]]))
    return ChoiceResult(frozenset([peaks[n // 2 - 1], peaks[n // 2]]))


# --- Handles -------------------------------------------------------------

def ballot_rank(ballot):
    """Lexicographic index of a permutation among all permutations of its size."""
    m = len(ballot)
    rank = 0
    remaining = list(range(m))
    for k, x in enumerate(ballot):
        j = remaining.index(x)
        rank += j * math.factorial(m - 1 - k)
        remaining.pop(j)
    return rank


def profile_rank(profile):
    """Index of ``profile`` in :func:`~scrutineer.core.enumerate_profiles` order."""
    base = math.factorial(profile.m)
    idx = 0
    for b in profile.ballots:
        idx = idx * base + ballot_rank(b)
    return idx


def _table_rule(profile, n, m, outputs):
    if profile.n != n or profile.m != m:
        raise ScrutineerError(f"table rule is defined for n={n}, m={m}")
    return ChoiceResult(outputs[profile_rank(profile)])


_SIMPLE = {
    "plurality": plurality,
    "condorcet": condorcet_rule,
    "copeland": copeland,
    "borda": borda,
    "symmetric-borda": symmetric_borda,
    "runoff": plurality_runoff,
    "stv": stv,
    "kemeny": kemeny,
    "dodgson": dodgson,
    "odd": odd_rule,
}

RULE_NAMES = tuple(_SIMPLE) + (
    "dictatorship:I", "quota:Q", "constant:X", "positional:W1,...,Wm",
    "veto", "approval:K", "median:AXIS",
)


@dataclass(frozen=True)
class RuleHandle:
    """A named, parameterised rule usable as a black box.

    ``evaluate`` returns the raw :class:`ChoiceResult`; calling the handle
    returns the winner set after the attached tie-break.
    """

    name: str
    params: tuple = ()
    tiebreak: TieBreak = NO_TIEBREAK
    func: Callable | None = field(default=None, compare=False, repr=False)

    def evaluate(self, profile):
        if self.func is not None:
            out = self.func(profile)
            return out if isinstance(out, ChoiceResult) else ChoiceResult(out)
        name, p = self.name, self.params
        if name in _SIMPLE:
            return _SIMPLE[name](profile)
        if name == "dictatorship":
            return dictatorship(profile, p[0])
        if name == "constant":
            return constant_rule(profile, p[0])
        if name == "quota":
            return quota_rule(profile, p[0])
        if name == "positional":
            return positional(profile, p)
        if name == "veto":
            return positional(profile, veto_vector(profile.m))
        if name == "approval":
            return positional(profile, k_approval_vector(profile.m, p[0]))
        if name == "median":
            return median_rule(profile, p)
        if name == "table":
            return _table_rule(profile, *p)
        raise ScrutineerError(f"unknown rule {name!r}")

    def __call__(self, profile):
        return self.tiebreak.apply(self.evaluate(profile).winners)

    def with_tiebreak(self, tiebreak):
        if isinstance(tiebreak, str):
            tiebreak = LEXICOGRAPHIC if tiebreak in ("lex", "lexicographic") else TieBreak(tiebreak)
        return RuleHandle(self.name, self.params, tiebreak, self.func)

    @property
    def lex(self):
        return self.with_tiebreak(LEXICOGRAPHIC)

    def score_vector(self, m):
        """Weights for positional-family rules, or ``None``."""
        if self.name in ("plurality",):
            return plurality_vector(m)
        if self.name == "borda":
            return borda_vector(m)
        if self.name == "veto":
            return veto_vector(m)
        if self.name == "approval":
            return k_approval_vector(m, self.params[0])
        if self.name == "positional":
            return tuple(Fraction(w) for w in self.params)
        return None

    def spec(self):
        if self.name == "table":
            base = f"table[n={self.params[0]},m={self.params[1]}]"
        elif self.params:
            sep = ">" if self.name == "median" else ","
            base = self.name + ":" + sep.join(str(x) for x in self.params)
        else:
            base = self.name
        return base + ("+lex" if self.tiebreak.mode == "lexicographic" else "")

    def __str__(self):
        return self.spec()

    @classmethod
    def from_function(cls, fn, name="function", tiebreak=NO_TIEBREAK):
        return cls(name, (), tiebreak, fn)

    @classmethod
    def from_table(cls, n, m, outputs, tiebreak=NO_TIEBREAK):
        """``outputs[k]`` is the winner set of the k-th profile in enumeration order."""
        return cls("table", (n, m, tuple(frozenset(o) for o in outputs)), tiebreak)


def _number(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ScrutineerError(f"not a rational number: {text!r}") from None


def _integer(text, what):
    try:
        return int(text)
    except ValueError:
        raise ScrutineerError(f"{what} must be an integer, got {text!r}") from None


def parse_rule(spec, tiebreak=None):
    """Parse ``NAME[:PARAMS][+lex]`` into a :class:`RuleHandle`."""
    spec = spec.strip()
    tb = NO_TIEBREAK
    if spec.endswith("+lex"):
        spec, tb = spec[:-4], LEXICOGRAPHIC
    if tiebreak is not None:
        tb = tiebreak if isinstance(tiebreak, TieBreak) else (
            LEXICOGRAPHIC if tiebreak in ("lex", "lexicographic") else TieBreak(tiebreak))
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    aliases = {"plurality-runoff": "runoff", "plr": "plurality", "k-approval": "approval",
               "symmetric_borda": "symmetric-borda", "dictator": "dictatorship"}
    name = aliases.get(name, name)
    if name in _SIMPLE or name == "veto":
        if arg:
            raise ScrutineerError(f"rule {name!r} takes no parameters")
        return RuleHandle(name, (), tb)
    if name not in _PARAMETRIC:
        raise ScrutineerError(f"unknown rule {name!r}; known: {', '.join(RULE_NAMES)}")
    if not arg:
        raise ScrutineerError(f"rule {name!r} needs a parameter")
    if name in ("dictatorship", "quota", "constant", "approval"):
        return RuleHandle(name, (_integer(arg, name + " parameter"),), tb)
    if name == "positional":
        return RuleHandle(name, tuple(_number(w) for w in arg.split(",")), tb)
    if name == "median":
        parts = [p.strip() for p in arg.split(">")] if ">" in arg else list(arg)
        if all(p.isdigit() for p in parts):
            return RuleHandle(name, tuple(int(p) for p in parts), tb)
        return RuleHandle(name, tuple(parts), tb)
    raise ScrutineerError(f"unknown rule {name!r}; known: {', '.join(RULE_NAMES)}")


_PARAMETRIC = ("dictatorship", "quota", "constant", "approval", "positional", "median")


def standard_catalog(n, m):
    """Rule handles that are well defined on every profile with ``n`` voters and ``m`` alternatives."""
    rules = [parse_rule(s) for s in ("plurality", "condorcet", "copeland", "borda",
                                     "symmetric-borda", "runoff", "stv", "kemeny", "veto")]
    rules += [RuleHandle("dictatorship", (i,)) for i in range(n)]
    rules += [RuleHandle("approval", (k,)) for k in range(1, m)]
    if n * m <= 9:
        rules.append(parse_rule("dodgson"))
    if m == 2:
        rules.append(parse_rule("odd"))
        rules += [RuleHandle("quota", (q,)) for q in range(1, n + 2)]
    return rules
