"""Axiom checking over enumerable domains, coalitions and impossibility search.

Every check works on a *table*: the list of outputs of a rule over a
:class:`Domain` of profiles. The same table checker serves black-box rules
(:func:`check_axiom`) and candidate functions built during
:func:`impossibility_search`.
"""

from __future__ import annotations

import enum
import itertools
import math
import multiprocessing
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .core import (
    BudgetExceeded,
    DEFAULT_PROFILE_BUDGET,
    Profile,
    ScrutineerError,
    WeakOrder,
    all_ballots,
    all_weak_orders,
    coalitions,
    default_labels,
    enumerate_profiles,
    prefers,
    restrict,
)
from .rules import RuleHandle, ballot_rank, standard_catalog
from .tournaments import condorcet_winner


class AxiomId(enum.Enum):
    ANONYMOUS = "ANONYMOUS"
    NEUTRAL = "NEUTRAL"
    NON_DICTATORIAL = "NON_DICTATORIAL"
    PARETO = "PARETO"
    UNANIMOUS = "UNANIMOUS"
    MONOTONIC = "MONOTONIC"
    POSITIVELY_RESPONSIVE = "POSITIVELY_RESPONSIVE"
    NON_IMPOSED = "NON_IMPOSED"
    RESOLUTE = "RESOLUTE"
    INDEPENDENT = "INDEPENDENT"
    CONDORCET_CONSISTENT = "CONDORCET_CONSISTENT"
    LIBERAL = "LIBERAL"
    STRATEGY_PROOF = "STRATEGY_PROOF"
    IIA_SPF = "IIA_SPF"
    PARETO_SPF = "PARETO_SPF"
    NON_DICTATORIAL_SPF = "NON_DICTATORIAL_SPF"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = text.strip().upper().replace("-", "_")
        key = {"IIA": "IIA_SPF"}.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ScrutineerError(f"unknown axiom {text!r}") from None


SPF_AXIOMS = frozenset({AxiomId.IIA_SPF, AxiomId.PARETO_SPF, AxiomId.NON_DICTATORIAL_SPF})
_SPF_FORMS = {AxiomId.PARETO: AxiomId.PARETO_SPF, AxiomId.NON_DICTATORIAL: AxiomId.NON_DICTATORIAL_SPF}


@dataclass
class CheckReport:
    axiom: AxiomId
    holds: bool
    witness: dict | None = None
    checked: int = 0

    @property
    def verdict(self):
        return "holds" if self.holds else "fails"


# --- Social preference functions -----------------------------------------

@dataclass(frozen=True)
class SPFHandle:
    """A social preference function: profile -> :class:`WeakOrder`."""

    name: str
    rule: RuleHandle | None = None
    table: tuple | None = None  # (n, m, outputs in enumeration order)

    def __call__(self, profile):
        if self.table is not None:
            n, m, outputs = self.table
            if profile.n != n or profile.m != m:
                raise ScrutineerError(f"table SPF is defined for n={n}, m={m}")
            from .rules import profile_rank

            return outputs[profile_rank(profile)]
        return iterated_choice(self.rule, profile)

    def spec(self):
        return self.name

    @classmethod
    def from_table(cls, n, m, outputs):
        return cls(f"table-spf[n={n},m={m}]", None, (n, m, tuple(outputs)))


def iterated_choice(rule, profile):
    """Rank the rule's winners first, then its winners on the rest, and so on."""
    tiers = []
    remaining = list(profile.alternatives)
    while remaining:
        sub = restrict(profile, remaining)
        won = rule(sub)
        tier = frozenset(remaining[w] for w in won)
        tiers.append(tier)
        remaining = [x for x in remaining if x not in tier]
    return WeakOrder(tuple(tiers))


def spf_of(rule):
    return SPFHandle("spf:" + rule.spec(), rule)


# --- Domains -------------------------------------------------------------

class Domain:
    """Profiles with fast lookup and pairwise-support bitmasks."""

    def __init__(self, n=None, m=None, profiles=None, labels=None, budget=DEFAULT_PROFILE_BUDGET):
        if profiles is None:
            if n is None or m is None:
                raise ScrutineerError("need n and m or an explicit list of profiles")
            self.full = True
            self.profiles = list(enumerate_profiles(n, m, labels, budget=budget))
        else:
            self.full = False
            self.profiles = list(profiles)
            if not self.profiles:
                raise ScrutineerError("empty profile domain")
            n, m = self.profiles[0].n, self.profiles[0].m
            if any(p.n != n or p.m != m for p in self.profiles):
                raise ScrutineerError("domain profiles must share n and m")
        self.n, self.m = n, m
        self.index = {p.ballots: k for k, p in enumerate(self.profiles)}
        self.all_voters = (1 << n) - 1

    def __len__(self):
        return len(self.profiles)

    def lookup(self, ballots):
        return self.index.get(tuple(ballots))

    @cached_property
    def masks(self):
        """``masks[k][x][y]`` = bitmask of voters ranking x above y in profile k."""
        out = []
        m = self.m
        for p in self.profiles:
            mat = [[0] * m for _ in range(m)]
            for i, b in enumerate(p.ballots):
                bit = 1 << i
                for a, x in enumerate(b):
                    for y in b[a + 1:]:
                        mat[x][y] |= bit
            out.append(mat)
        return out

    def lifts(self, k, x):
        """Indices of profiles P' meeting the monotonicity side conditions for x (P' may equal P)."""
        p = self.profiles[k]
        if self.full:
            options = []
            for b in p.ballots:
                rest = [y for y in b if y != x]
                pos = b.index(x)
                options.append([tuple(rest[:t] + [x] + rest[t:]) for t in range(pos + 1)])
            return [self.index[combo] for combo in itertools.product(*options)]
        mk = self.masks[k]
        out = []
        others = [y for y in range(self.m) if y != x]
        for j, mj in enumerate(self.masks):
            if all(mk[x][y] & ~mj[x][y] == 0 for y in others) and \
                    all(mk[y][z] == mj[y][z] for y in others for z in others if y != z):
                out.append(j)
        return out


def _perm_ballot(b, rho):
    return tuple(rho[x] for x in b)


def _fmt(s):
    return sorted(s)


def _mask_set(mask, n):
    return frozenset(i for i in range(n) if mask >> i & 1)


def _apply_rho(value, rho):
    if isinstance(value, WeakOrder):
        return WeakOrder(tuple(frozenset(rho[x] for x in t) for t in value.tiers))
    return frozenset(rho[x] for x in value)


def check_table(domain, outputs, axiom):
    """Check ``axiom`` for the function taking ``outputs[k]`` on ``domain.profiles[k]``."""
    axiom = AxiomId.parse(axiom)
    P = domain.profiles
    n, m = domain.n, domain.m
    full = domain.all_voters
    count = len(P)

    def fail(**w):
        return CheckReport(axiom, False, w, count)

    if axiom is AxiomId.ANONYMOUS:
        seen = {}
        for k, p in enumerate(P):
            key = tuple(sorted(p.ballots))
            if key in seen:
                j = seen[key]
                if outputs[j] != outputs[k]:
                    # a permutation taking P[j] to P[k]
                    pool = defaultdict(list)
                    for i, b in enumerate(P[j].ballots):
                        pool[b].append(i)
                    pi = [pool[b].pop(0) for b in p.ballots]
                    return fail(profiles=[P[j], p], permutation=pi,
                                outputs=[outputs[j], outputs[k]])
            else:
                seen[key] = k
    elif axiom is AxiomId.NEUTRAL:
        for rho in itertools.permutations(range(m)):
            for k, p in enumerate(P):
                j = domain.lookup(tuple(_perm_ballot(b, rho) for b in p.ballots))
                if j is None:
                    continue
                if _apply_rho(outputs[k], rho) != outputs[j]:
                    return fail(profiles=[p, P[j]], permutation=list(rho),
                                outputs=[outputs[k], outputs[j]])
    elif axiom is AxiomId.NON_DICTATORIAL:
        for i in range(n):
            if all(outputs[k] == frozenset([p.ballots[i][0]]) for k, p in enumerate(P)):
                return fail(dictator=i)
    elif axiom is AxiomId.PARETO:
        masks = domain.masks
        for k, p in enumerate(P):
            for x in outputs[k]:
                for y in range(m):
                    if y != x and masks[k][y][x] == full:
                        return fail(profiles=[p], dominated=x, dominator=y, outputs=[outputs[k]])
    elif axiom is AxiomId.UNANIMOUS:
        for k, p in enumerate(P):
            tops = set(p.tops())
            if len(tops) == 1 and outputs[k] != frozenset(tops):
                return fail(profiles=[p], top=next(iter(tops)), outputs=[outputs[k]])
    elif axiom in (AxiomId.MONOTONIC, AxiomId.POSITIVELY_RESPONSIVE):
        positive = axiom is AxiomId.POSITIVELY_RESPONSIVE
        for k, p in enumerate(P):
            for x in sorted(outputs[k]):
                for j in domain.lifts(k, x):
                    if j == k:
                        continue
                    bad = outputs[j] != frozenset([x]) if positive else x not in outputs[j]
                    if bad:
                        return fail(profiles=[p, P[j]], alternative=x,
                                    outputs=[outputs[k], outputs[j]])
    elif axiom is AxiomId.NON_IMPOSED:
        for x in range(m):
            if not any(o == frozenset([x]) for o in outputs):
                return fail(never=x)
    elif axiom is AxiomId.RESOLUTE:
        for k, p in enumerate(P):
            if len(outputs[k]) != 1:
                return fail(profiles=[p], outputs=[outputs[k]])
    elif axiom is AxiomId.INDEPENDENT:
        masks = domain.masks
        for x, y in itertools.permutations(range(m), 2):
            groups = defaultdict(lambda: ([], []))
            for k in range(len(P)):
                chosen, has_y = groups[masks[k][x][y]]
                if x in outputs[k] and y not in outputs[k]:
                    chosen.append(k)
                if y in outputs[k]:
                    has_y.append(k)
            for mask in sorted(groups):
                chosen, has_y = groups[mask]
                if chosen and has_y:
                    a, b = chosen[0], has_y[0]
                    return fail(profiles=[P[a], P[b]], x=x, y=y,
                                outputs=[outputs[a], outputs[b]])
    elif axiom is AxiomId.CONDORCET_CONSISTENT:
        for k, p in enumerate(P):
            cw = condorcet_winner(p)
            if cw and outputs[k] != cw:
                return fail(profiles=[p], condorcet_winner=next(iter(cw)), outputs=[outputs[k]])
    elif axiom is AxiomId.LIBERAL:
        pairs = {}
        masks = domain.masks
        for i in range(n):
            bit = 1 << i
            good = []
            for x, y in itertools.combinations(range(m), 2):
                if all(not (masks[k][x][y] & bit and y in outputs[k]) and
                       not (masks[k][y][x] & bit and x in outputs[k]) for k in range(len(P))):
                    good.append((x, y))
            pairs[i] = good
        for i in range(n):
            if not pairs[i]:
                partial = {j: list(pairs[j][0]) for j in range(n) if pairs[j]}
                return fail(voter=i, assignment=partial)
    elif axiom is AxiomId.STRATEGY_PROOF:
        if any(len(o) != 1 for o in outputs):
            raise ScrutineerError("strategy-proofness needs a resolute rule; attach a tie-break")
        ballots = all_ballots(m)
        for k, p in enumerate(P):
            (honest,) = outputs[k]
            for i, truthful in enumerate(p.ballots):
                for b in ballots:
                    if b == truthful:
                        continue
                    new = p.ballots[:i] + (b,) + p.ballots[i + 1:]
                    j = domain.lookup(new)
                    if j is None:
                        continue
                    (got,) = outputs[j]
                    if prefers(truthful, got, honest):
                        return fail(profiles=[p, P[j]], voter=i, truthful=truthful, strategic=b,
                                    outputs=[outputs[k], outputs[j]])
    elif axiom is AxiomId.IIA_SPF:
        masks = domain.masks
        for x, y in itertools.permutations(range(m), 2):
            first = {}
            for k in range(len(P)):
                key = masks[k][x][y]
                val = outputs[k].weakly_prefers(x, y)
                if key in first:
                    j, v = first[key]
                    if v != val:
                        return fail(profiles=[P[j], P[k]], x=x, y=y, outputs=[outputs[j], outputs[k]])
                else:
                    first[key] = (k, val)
    elif axiom is AxiomId.PARETO_SPF:
        masks = domain.masks
        for k, p in enumerate(P):
            for x, y in itertools.permutations(range(m), 2):
                if masks[k][x][y] == full and not outputs[k].strictly_prefers(x, y):
                    return fail(profiles=[p], x=x, y=y, outputs=[outputs[k]])
    elif axiom is AxiomId.NON_DICTATORIAL_SPF:
        for i in range(n):
            if all(outputs[k] == WeakOrder.from_ballot(p.ballots[i]) for k, p in enumerate(P)):
                return fail(dictator=i)
    return CheckReport(axiom, True, None, count)


# --- Black-box evaluation ------------------------------------------------

_WORKER_FN = None


def _init_worker(fn):
    global _WORKER_FN
    _WORKER_FN = fn


def _apply_chunk(chunk):
    return [_WORKER_FN(p) for p in chunk]


def evaluate_all(fn, profiles, jobs=1):
    """``[fn(p) for p in profiles]``, optionally split over forked workers."""
    profiles = list(profiles)
    if jobs <= 1 or len(profiles) < 256:
        return [fn(p) for p in profiles]
    size = math.ceil(len(profiles) / jobs)
    chunks = [profiles[i:i + size] for i in range(0, len(profiles), size)]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(jobs, initializer=_init_worker, initargs=(fn,)) as pool:
        parts = pool.map(_apply_chunk, chunks)
    return [o for part in parts for o in part]


def check_axiom(rule, axiom, n=None, m=None, profiles=None, jobs=1, budget=DEFAULT_PROFILE_BUDGET):
    """Check one axiom for ``rule`` over all ``(n, m)`` profiles or an explicit list.

    For SPF axioms pass an :class:`SPFHandle` (a plain rule handle is turned
    into its iterated-choice SPF). With an explicit list only pairs of
    profiles inside the list are compared.
    """
    axiom = AxiomId.parse(axiom)
    domain = profiles if isinstance(profiles, Domain) else Domain(n, m, profiles, budget=budget)
    fn = rule
    if axiom in SPF_AXIOMS and isinstance(rule, RuleHandle):
        fn = spf_of(rule)
    outputs = evaluate_all(fn, domain.profiles, jobs)
    return check_table(domain, outputs, axiom)


def replay(rule, report):
    """Re-evaluate ``rule`` on the witness profiles; True iff the violation reproduces."""
    if report.holds:
        return False
    w = report.witness
    ax = report.axiom
    fn = spf_of(rule) if ax in SPF_AXIOMS and isinstance(rule, RuleHandle) else rule
    profiles = w.get("profiles")
    if profiles is not None:
        outs = [fn(p) for p in profiles]
        if outs != list(w["outputs"]):
            return False
    if ax is AxiomId.ANONYMOUS:
        a, b = profiles
        pi = w["permutation"]
        return b.ballots == tuple(a.ballots[pi[i]] for i in range(a.n)) and outs[0] != outs[1]
    if ax is AxiomId.NEUTRAL:
        rho = w["permutation"]
        a, b = profiles
        return b.ballots == tuple(_perm_ballot(x, rho) for x in a.ballots) and \
            _apply_rho(outs[0], rho) != outs[1]
    if ax is AxiomId.PARETO:
        (p,) = profiles
        x, y = w["dominated"], w["dominator"]
        return x in outs[0] and all(prefers(b, y, x) for b in p.ballots)
    if ax is AxiomId.UNANIMOUS:
        return set(profiles[0].tops()) == {w["top"]} and outs[0] != frozenset([w["top"]])
    if ax in (AxiomId.MONOTONIC, AxiomId.POSITIVELY_RESPONSIVE):
        a, b = profiles
        x = w["alternative"]
        d = Domain(profiles=[a, b])
        if 1 not in d.lifts(0, x) or a == b or x not in outs[0]:
            return False
        return outs[1] != frozenset([x]) if ax is AxiomId.POSITIVELY_RESPONSIVE else x not in outs[1]
    if ax is AxiomId.INDEPENDENT:
        a, b = profiles
        x, y = w["x"], w["y"]
        return (a.voters_preferring(x, y) == b.voters_preferring(x, y)
                and x in outs[0] and y not in outs[0] and y in outs[1])
    if ax is AxiomId.CONDORCET_CONSISTENT:
        return condorcet_winner(profiles[0]) == {w["condorcet_winner"]} and \
            outs[0] != {w["condorcet_winner"]}
    if ax is AxiomId.RESOLUTE:
        return len(outs[0]) != 1
    if ax is AxiomId.STRATEGY_PROOF:
        a, b = profiles
        i = w["voter"]
        same_others = all(a.ballots[j] == b.ballots[j] for j in range(a.n) if j != i)
        (h,), (g,) = outs
        return same_others and prefers(a.ballots[i], g, h)
    if ax is AxiomId.IIA_SPF:
        a, b = profiles
        x, y = w["x"], w["y"]
        return a.voters_preferring(x, y) == b.voters_preferring(x, y) and \
            outs[0].weakly_prefers(x, y) != outs[1].weakly_prefers(x, y)
    if ax is AxiomId.PARETO_SPF:
        x, y = w["x"], w["y"]
        return all(prefers(b, x, y) for b in profiles[0].ballots) and not outs[0].strictly_prefers(x, y)
    # axioms with global witnesses (dictator, never-chosen alternative, liberal voter)
    return True


def implication_suite(n, m, catalog=None, jobs=1):
    """Check the three implications among non-imposition, monotonicity, Pareto and unanimity."""
    catalog = standard_catalog(n, m) if catalog is None else catalog
    domain = Domain(n, m)
    rows = []
    for rule in catalog:
        outputs = evaluate_all(rule, domain.profiles, jobs)
        v = {ax.value: check_table(domain, outputs, ax).holds
             for ax in (AxiomId.NON_IMPOSED, AxiomId.MONOTONIC, AxiomId.PARETO, AxiomId.UNANIMOUS)}
        violations = []
        if v["NON_IMPOSED"] and v["MONOTONIC"] and not v["UNANIMOUS"]:
            violations.append("non-imposed and monotonic but not unanimous")
        if v["PARETO"] and not v["UNANIMOUS"]:
            violations.append("Pareto but not unanimous")
        if v["UNANIMOUS"] and not v["NON_IMPOSED"]:
            violations.append("unanimous but imposed")
        rows.append({"rule": rule.spec(), "verdicts": v, "violations": violations})
    return rows


# --- Coalitions ----------------------------------------------------------

@dataclass
class CoalitionFamily:
    n: int
    members: frozenset
    per_pair: dict = field(default_factory=dict)

    def __contains__(self, c):
        return frozenset(c) in self.members

    def sorted_members(self):
        return sorted(self.members, key=lambda c: (len(c), sorted(c)))


def _coalition_family(n, m, bad_masks):
    """``bad_masks[(x, y)]`` holds masks N^{xy} of profiles where the conclusion fails."""
    per_pair = {}
    for pair, bad in bad_masks.items():
        good = set()
        for c in coalitions(n):
            cm = sum(1 << i for i in c)
            if not any(cm & ~b == 0 for b in bad):
                good.add(c)
        per_pair[pair] = frozenset(good)
    overall = frozenset.intersection(*per_pair.values()) if per_pair else frozenset(coalitions(n))
    return CoalitionFamily(n, overall, per_pair)


def decisive_coalitions(spf, n, m, jobs=1):
    """Decisive coalitions; ``per_pair[(x, y)]`` are those decisive for x over y."""
    domain = Domain(n, m)
    outputs = evaluate_all(spf, domain.profiles, jobs)
    bad = {pair: set() for pair in itertools.permutations(range(m), 2)}
    for k, out in enumerate(outputs):
        for x, y in bad:
            if not out.strictly_prefers(x, y):
                bad[(x, y)].add(domain.masks[k][x][y])
    return _coalition_family(n, m, bad)


def blocking_coalitions(rule, n, m, jobs=1):
    """Blocking coalitions; ``per_pair[(x, y)]`` block y whenever they all prefer x to y."""
    domain = Domain(n, m)
    outputs = evaluate_all(rule, domain.profiles, jobs)
    if any(len(o) != 1 for o in outputs):
        raise ScrutineerError("blocking coalitions are defined for resolute rules")
    bad = {pair: set() for pair in itertools.permutations(range(m), 2)}
    for k, out in enumerate(outputs):
        for x, y in bad:
            if y in out:
                bad[(x, y)].add(domain.masks[k][x][y])
    return _coalition_family(n, m, bad)


@dataclass
class UltrafilterReport:
    grand_set: bool
    complement_dichotomy: bool
    intersection_closed: bool
    superset_closed: bool
    principal: frozenset | None
    complement_failures: list
    intersection_failures: list
    superset_failures: list

    @property
    def is_ultrafilter(self):
        return self.grand_set and self.complement_dichotomy and self.intersection_closed


def ultrafilter_check(fam):
    n = fam.n
    everyone = frozenset(range(n))
    members = fam.members
    all_c = coalitions(n)
    comp = [c for c in all_c if (c in members) == ((everyone - c) in members)]
    inter = [(c, d) for c, d in itertools.combinations(fam.sorted_members(), 2)
             if (c & d) not in members]
    sup = [(c, d) for c in fam.sorted_members() for d in all_c if c < d and d not in members]
    grand = everyone in members
    principal = None
    if grand and not comp and not inter:
        singles = [c for c in members if len(c) == 1]
        principal = singles[0] if singles else None
    return UltrafilterReport(grand, not comp, not inter, not sup, principal, comp, inter, sup)


# --- Sen's liberal paradox ------------------------------------------------

@dataclass
class SenWitness:
    profile: Profile
    exclusions: dict  # alternative -> reason


def exclusion_cover(profile, assignment):
    """Alternatives excluded by liberal vetoes or Pareto dominance, with reasons."""
    out = {}
    for i, (x, y) in assignment.items():
        b = profile.ballots[i]
        loser = y if prefers(b, x, y) else x
        out.setdefault(loser, f"voter {i} decisive on {{{profile.label(x)},{profile.label(y)}}}")
    for x in profile.alternatives:
        if x in out:
            continue
        for y in profile.alternatives:
            if y != x and all(prefers(b, y, x) for b in profile.ballots):
                out[x] = f"Pareto-dominated by {profile.label(y)}"
                break
    return out


def sen_witness(n, m, assignment, labels=None):
    """A profile where the liberal vetoes of ``assignment`` plus Pareto exclude everything.

    ``assignment`` maps two voters to their (distinct) decisive pairs.
    """
    if n < 2 or m < 3:
        raise ScrutineerError("the liberal paradox needs n >= 2 and m >= 3")
    assignment = {int(i): tuple(p) for i, p in assignment.items()}
    if len(assignment) != 2:
        raise ScrutineerError("give decisive pairs for exactly two voters")
    (i0, p0), (i1, p1) = sorted(assignment.items())
    if i0 == i1 or set(p0) == set(p1):
        raise ScrutineerError("degenerate assignment: voters and pairs must differ")
    for p in (p0, p1):
        if len(set(p)) != 2 or not all(0 <= x < m for x in p):
            raise ScrutineerError(f"bad pair {p}")
    relevant = sorted(set(p0) | set(p1))
    tail = [x for x in range(m) if x not in relevant]
    labels = default_labels(m) if labels is None else tuple(labels)
    heads = list(itertools.permutations(relevant))
    for h0, h1, hr in itertools.product(heads, repeat=3):
        ballots = []
        for i in range(n):
            head = h0 if i == i0 else h1 if i == i1 else hr
            ballots.append(tuple(head) + tuple(tail))
        prof = Profile(labels, tuple(ballots))
        cover = exclusion_cover(prof, assignment)
        if len(cover) == m:
            return SenWitness(prof, cover)
    raise ScrutineerError("no witness found")  # cannot happen for distinct pairs


# --- SPF linearity -------------------------------------------------------

@dataclass
class LinearityReport:
    premise_holds: bool
    premise_failures: dict
    tie: Profile | None
    tie_order: WeakOrder | None

    @property
    def verdict(self):
        if not self.premise_holds:
            return "premise fails"
        return "holds" if self.tie is None else "violated"


def spf_linearity_check(spf, n, m, jobs=1):
    domain = Domain(n, m)
    outputs = evaluate_all(spf, domain.profiles, jobs)
    failures = {}
    for ax in (AxiomId.IIA_SPF, AxiomId.PARETO_SPF):
        rep = check_table(domain, outputs, ax)
        if not rep.holds:
            failures[ax.value] = rep
    tie = next(((p, o) for p, o in zip(domain.profiles, outputs) if not o.is_linear()), (None, None))
    return LinearityReport(not failures, failures, tie[0], tie[1])


# --- Impossibility search ------------------------------------------------

def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass
class SearchResult:
    status: str  # "SAT" or "UNSAT"
    count: int
    witnesses: list
    method: str
    nodes: int
    tables: int | None = None
    axioms: tuple = ()

    @property
    def unsat(self):
        return self.count == 0


class _Model:
    def __init__(self, n, m, kind, axioms, budget):
        self.n, self.m, self.kind = n, m, kind
        self.axioms = axioms
        self.domain = Domain(n, m, budget=budget)
        if kind == "SPF":
            self.values = all_weak_orders(m)
        elif AxiomId.RESOLUTE in axioms or AxiomId.STRATEGY_PROOF in axioms:
            self.values = [frozenset([x]) for x in range(m)]
        else:
            self.values = [frozenset(c) for size in range(1, m + 1)
                           for c in itertools.combinations(range(m), size)]
        self.vindex = {v: a for a, v in enumerate(self.values)}
        V = len(self.values)
        N = len(self.domain)
        self.full_mask = (1 << V) - 1
        self.dom = [self.full_mask] * N
        self.arc_tables = defaultdict(lambda: None)
        self.groups = []
        self.var_groups = defaultdict(list)
        self._build()
        self.neighbors = defaultdict(list)
        for (u, v), table in self.arc_tables.items():
            self.neighbors[u].append((v, table))
        for u in self.neighbors:
            self.neighbors[u].sort(key=lambda e: e[0])
        hamming = [n - max(p.ballots.count(b) for b in set(p.ballots)) for p in self.domain.profiles]
        self.order = sorted(range(N), key=lambda k: (hamming[k], k))

    # constraint builders
    def _unary(self, pred):
        for k, p in enumerate(self.domain.profiles):
            keep = 0
            for a, v in enumerate(self.values):
                if pred(k, p, v):
                    keep |= 1 << a
            self.dom[k] &= keep

    def _binary(self, u, v, pred):
        if u == v:
            self._unary(lambda k, p, val: k != u or pred(val, val))
            return
        V = len(self.values)
        fwd = [0] * V
        back = [0] * V
        for a in range(V):
            for b in range(V):
                if pred(self.values[a], self.values[b]):
                    fwd[a] |= 1 << b
                    back[b] |= 1 << a
        for key, table in (((u, v), fwd), ((v, u), back)):
            old = self.arc_tables[key]
            self.arc_tables[key] = table if old is None else [x & y for x, y in zip(old, table)]

    def _build(self):
        d = self.domain
        P = d.profiles
        m, n = self.m, self.n
        full = d.all_voters
        masks = d.masks
        for ax in self.axioms:
            if ax is AxiomId.RESOLUTE:
                self._unary(lambda k, p, v: len(v) == 1)
            elif ax is AxiomId.PARETO:
                self._unary(lambda k, p, v: not any(masks[k][y][x] == full
                                                    for x in v for y in range(m) if y != x))
            elif ax is AxiomId.UNANIMOUS:
                self._unary(lambda k, p, v: len(set(p.tops())) > 1 or v == frozenset(p.tops()))
            elif ax is AxiomId.CONDORCET_CONSISTENT:
                cws = [condorcet_winner(p) for p in P]
                self._unary(lambda k, p, v: not cws[k] or v == cws[k])
            elif ax is AxiomId.PARETO_SPF:
                self._unary(lambda k, p, v: all(v.strictly_prefers(x, y)
                                                for x, y in itertools.permutations(range(m), 2)
                                                if masks[k][x][y] == full))
            elif ax is AxiomId.ANONYMOUS:
                for k, p in enumerate(P):
                    for i in range(n - 1):
                        b = list(p.ballots)
                        b[i], b[i + 1] = b[i + 1], b[i]
                        j = d.lookup(b)
                        if j != k:
                            self._binary(k, j, lambda a, c: a == c)
            elif ax is AxiomId.NEUTRAL:
                for rho in itertools.permutations(range(m)):
                    if list(rho) == list(range(m)):
                        continue
                    for k, p in enumerate(P):
                        j = d.lookup(tuple(_perm_ballot(b, rho) for b in p.ballots))
                        self._binary(k, j, lambda a, c, rho=rho: _apply_rho(a, rho) == c)
            elif ax in (AxiomId.MONOTONIC, AxiomId.POSITIVELY_RESPONSIVE):
                positive = ax is AxiomId.POSITIVELY_RESPONSIVE
                for k in range(len(P)):
                    for x in range(m):
                        for j in d.lifts(k, x):
                            if j == k:
                                continue
                            if positive:
                                pred = lambda a, c, x=x: x not in a or c == frozenset([x])
                            else:
                                pred = lambda a, c, x=x: x not in a or x in c
                            self._binary(k, j, pred)
            elif ax is AxiomId.STRATEGY_PROOF:
                ballots = all_ballots(m)
                for k, p in enumerate(P):
                    for i in range(n):
                        bi = p.ballots[i]
                        for b in ballots:
                            if b <= bi:
                                continue  # each unordered neighbour pair once
                            j = d.lookup(p.ballots[:i] + (b,) + p.ballots[i + 1:])

                            def pred(a, c, bi=bi, b=b):
                                (x,), (y,) = a, c
                                return not prefers(bi, y, x) and not prefers(b, x, y)
                            self._binary(k, j, pred)
            elif ax in (AxiomId.INDEPENDENT, AxiomId.IIA_SPF):
                for x, y in itertools.permutations(range(m), 2):
                    groups = defaultdict(list)
                    for k in range(len(P)):
                        groups[masks[k][x][y]].append(k)
                    for members in groups.values():
                        if len(members) < 2:
                            continue
                        if ax is AxiomId.IIA_SPF:
                            t = sum(1 << a for a, v in enumerate(self.values) if v.weakly_prefers(x, y))
                            g = ("iia", members, t, self.full_mask & ~t)
                        else:
                            a_mask = sum(1 << a for a, v in enumerate(self.values)
                                         if x in v and y not in v)
                            y_mask = sum(1 << a for a, v in enumerate(self.values) if y in v)
                            g = ("ind", members, a_mask, y_mask)
                        gid = len(self.groups)
                        self.groups.append(g)
                        for k in members:
                            self.var_groups[k].append(gid)
        # NON_IMPOSED, NON_DICTATORIAL(_SPF), LIBERAL are checked on complete tables

    def _group(self, g, dom, changed):
        kind, members, t, f = g
        if kind == "iia":
            can_t = all(dom[k] & t for k in members)
            can_f = all(dom[k] & f for k in members)
            keep = (t if can_t else 0) | (f if can_f else 0)
        else:
            # forbid an "x in, y out" member together with a "y in" member
            forced_a = any(dom[k] & ~t == 0 for k in members)
            forced_y = any(dom[k] & ~f == 0 for k in members)
            if forced_a and forced_y:
                return False
            keep = self.full_mask
            if forced_a:
                keep &= ~f
            if forced_y:
                keep &= ~t
        for k in members:
            nd = dom[k] & keep
            if nd != dom[k]:
                if not nd:
                    return False
                dom[k] = nd
                changed.append(k)
        return True

    def propagate(self, dom, queue):
        queue = list(queue)
        while queue:
            u = queue.pop()
            du = dom[u]
            for v, table in self.neighbors[u]:
                allowed = 0
                for a in _bits(du):
                    allowed |= table[a]
                nd = dom[v] & allowed
                if nd != dom[v]:
                    if not nd:
                        return False
                    dom[v] = nd
                    queue.append(v)
            for gid in self.var_groups[u]:
                changed = []
                if not self._group(self.groups[gid], dom, changed):
                    return False
                queue.extend(changed)
        if AxiomId.NON_IMPOSED in self.axioms:
            for x in range(self.m):
                a = self.vindex.get(frozenset([x]))
                if a is None or not any(d >> a & 1 for d in dom):
                    return False
        return True

    def table(self, dom):
        return [self.values[next(_bits(d))] for d in dom]

    def accept(self, outputs):
        return all(check_table(self.domain, outputs, ax).holds for ax in self.axioms)


def _search_branch(model, dom, limit, witness_cap):
    """Depth-first MAC search from ``dom``; returns (count, witnesses, nodes)."""
    count = 0
    witnesses = []
    nodes = 0
    order = model.order
    stack = [dom]
    while stack:
        d = stack.pop()
        nodes += 1
        if nodes > limit:
            raise BudgetExceeded(f"search exceeded {limit} nodes", partial={"count": count, "nodes": nodes})
        var = next((k for k in order if d[k] & (d[k] - 1)), None)
        if var is None:
            outputs = model.table(d)
            if model.accept(outputs):
                count += 1
                if len(witnesses) < witness_cap:
                    witnesses.append(outputs)
            continue
        children = []
        for a in _bits(d[var]):
            nd = list(d)
            nd[var] = 1 << a
            if model.propagate(nd, [var]):
                children.append(nd)
        stack.extend(reversed(children))
    return count, witnesses, nodes


_SEARCH_MODEL = None


def _search_worker(args):
    dom, limit, cap = args
    return _search_branch(_SEARCH_MODEL, dom, limit, cap)


def impossibility_search(n, m, kind="SCF", axioms=(), budget=10**7, max_witnesses=16, jobs=1,
                         node_budget=10**7):
    """Census of all functions (tables) over the ``(n, m)`` domain satisfying ``axioms``.

    Small spaces (``values ** profiles <= budget``) are enumerated outright;
    larger ones are searched by backtracking with arc consistency.
    """
    global _SEARCH_MODEL
    kind = kind.upper()
    if kind not in ("SCF", "SPF"):
        raise ScrutineerError("kind must be SCF or SPF")
    parsed = {AxiomId.parse(a) for a in axioms}
    if kind == "SPF":
        parsed = {_SPF_FORMS.get(a, a) for a in parsed}
    axioms = tuple(sorted(parsed, key=lambda a: a.value))
    for ax in axioms:
        if (ax in SPF_AXIOMS) != (kind == "SPF"):
            raise ScrutineerError(f"axiom {ax.value} does not apply to kind {kind}")
    if AxiomId.LIBERAL in axioms:
        return _liberal_search(n, m, axioms, budget, max_witnesses, node_budget)
    model = _Model(n, m, kind, axioms, budget)
    N = len(model.domain)
    V = len(model.values)

    def wrap(outputs):
        if kind == "SPF":
            return SPFHandle.from_table(n, m, outputs)
        return RuleHandle.from_table(n, m, outputs)

    if V ** N <= budget:
        count, witnesses = 0, []
        for combo in itertools.product(model.values, repeat=N):
            outputs = list(combo)
            if model.accept(outputs):
                count += 1
                if len(witnesses) < max_witnesses:
                    witnesses.append(outputs)
        return SearchResult("SAT" if count else "UNSAT", count, [wrap(w) for w in witnesses],
                            "enumeration", V ** N, V ** N, axioms)

    dom = list(model.dom)
    if not all(dom) or not model.propagate(dom, range(N)):
        return SearchResult("UNSAT", 0, [], "backtracking", 1, None, axioms)
    first = next((k for k in model.order if dom[k] & (dom[k] - 1)), None)
    if jobs > 1 and first is not None:
        branches = []
        for a in _bits(dom[first]):
            nd = list(dom)
            nd[first] = 1 << a
            if model.propagate(nd, [first]):
                branches.append(nd)
        _SEARCH_MODEL = model
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            parts = pool.map(_search_worker, [(b, node_budget, max_witnesses) for b in branches])
        _SEARCH_MODEL = None
        count = sum(p[0] for p in parts)
        witnesses = [w for p in parts for w in p[1]][:max_witnesses]
        nodes = 1 + sum(p[2] for p in parts)
    else:
        count, witnesses, nodes = _search_branch(model, dom, node_budget, max_witnesses)
    return SearchResult("SAT" if count else "UNSAT", count, [wrap(w) for w in witnesses],
                        "backtracking", nodes, None, axioms)


def _liberal_search(n, m, axioms, budget, max_witnesses, node_budget):
    """Split LIBERAL into one search per assignment of a decisive pair to each voter.

    Each assignment becomes a unary constraint, so the other axioms propagate
    against it. Solutions are collected and deduplicated across assignments,
    which yields the exact census of tables liberal for some assignment.
    """
    base = tuple(a for a in axioms if a is not AxiomId.LIBERAL)
    found = {}
    nodes = 0
    pairs = list(itertools.combinations(range(m), 2))
    for assignment in itertools.product(pairs, repeat=n):
        model = _Model(n, m, "SCF", base, budget)
        masks = model.domain.masks

        def allowed(k, p, v, assignment=assignment):
            for i, (x, y) in enumerate(assignment):
                loser = y if masks[k][x][y] >> i & 1 else x
                if loser in v:
                    return False
            return True

        model._unary(allowed)
        dom = list(model.dom)
        if not all(dom) or not model.propagate(dom, range(len(dom))):
            nodes += 1
            continue
        _, tables, used = _search_branch(model, dom, node_budget - nodes, float("inf"))
        nodes += used
        for t in tables:
            found.setdefault(tuple(t), None)
    witnesses = [RuleHandle.from_table(n, m, list(t)) for t in list(found)[:max_witnesses]]
    return SearchResult("SAT" if found else "UNSAT", len(found), witnesses, "backtracking",
                        nodes, None, axioms)


def identify_table(handle, n, m, catalog=None):
    """Names of catalog rules whose table over ``(n, m)`` equals ``handle``'s."""
    domain = Domain(n, m)
    target = [handle(p) for p in domain.profiles]
    names = []
    for rule in (standard_catalog(n, m) if catalog is None else catalog):
        try:
            if [rule(p) for p in domain.profiles] == target:
                names.append(rule.spec())
        except ScrutineerError:
            continue
    return names
