"""Acceptance criteria, one test and one PASS/FAIL line per criterion.

Each test gathers its sub-checks, prints a single verdict line through the
``criterion_line`` fixture and then asserts. Failing sub-checks are named in
the line so the terminal summary shows exactly what did not hold.
"""

import itertools
import subprocess
import sys
import time
from fractions import Fraction

from scrutineer import fixture
from scrutineer.axioms import (
    CoalitionFamily,
    decisive_coalitions,
    impossibility_search,
    spf_of,
    ultrafilter_check,
)
from scrutineer.consensus import ConsensusClass, DistanceId, closest_consensus
from scrutineer.core import coalitions, enumerate_profiles
from scrutineer.epistemic import (
    borda_mle_winners,
    hoeffding_bound,
    jury_accuracy,
    jury_accuracy_recursive,
    min_disagreement_rankings,
    mle_rankings,
    sample_tournament_profile,
)
from scrutineer.multiwinner import (
    CSTVMode,
    best_k,
    chamberlin_courant,
    condorcet_committees,
    cstv,
    pav_k,
)
from scrutineer.rules import (
    RuleHandle,
    borda,
    borda_vector,
    condorcet_rule,
    copeland,
    kemeny,
    median_rule,
    parse_rule,
    plurality,
    plurality_runoff,
    positional,
    symmetric_borda,
)
from scrutineer.strategy import StrategySpace, black_suite, dynamic_poa, find_manipulation
from scrutineer.tournaments import condorcet_winner

JURY_GRID = [Fraction(3, 5), Fraction(2, 3), Fraction(9, 10)]
ODD_N = range(1, 22, 2)


def _names(profile, alts):
    return {profile.labels[x] for x in alts}


def _committees(profile, cs):
    return {frozenset(profile.labels[x] for x in c) for c in cs}


def _show(profile):
    return " ".join(profile.ballot_str(b) for b in profile.ballots)


def _verdict(criterion_line, number, failures, elapsed, limit):
    if elapsed >= limit:
        failures.append(f"runtime {elapsed:.2f}s >= {limit}s")
    detail = f"{elapsed:.2f}s (limit {limit}s)"
    if failures:
        detail += "; failed: " + "; ".join(failures)
    return criterion_line(number, not failures, detail)


def test_criterion_1_example_regressions(criterion_line):
    start = time.perf_counter()
    bad = []

    def check(label, got, want):
        if got != want:
            bad.append(f"{label}: expected {want}, got {got}")

    pliny = fixture("PLINY")
    check("plurality(PLINY)", _names(pliny, plurality(pliny).winners), {"a"})
    check("condorcet_winner(PLINY)", _names(pliny, condorcet_winner(pliny)), {"b"})

    gore = fixture("GORE")
    res = positional(gore, borda_vector(gore.m))
    check("Borda(GORE)", _names(gore, res.winners), {"Bush"})
    scores = {gore.labels[x]: s for x, s in res.scores.items()}
    for name, want in [("Bush", 246), ("Gore", 200), ("Nader", 55), ("Buchanan", 96)]:
        check(f"Borda score {name}", scores[name], want)

    young = fixture("YOUNG")
    k = kemeny(young)
    check("kemeny(YOUNG)", _names(young, k.winners), {"b"})
    check("kemeny distance(YOUNG)", k.extras["distance"], 76)

    for name, want in [("RUNOFF_A", {"c"}), ("RUNOFF_B", {"b"})]:
        p = fixture(name)
        check(f"runoff({name})", _names(p, plurality_runoff(p).winners), want)

    c3 = fixture("CONDORCET3")
    check("copeland(CONDORCET3)", _names(c3, copeland(c3).winners), {"a", "b", "c"})
    check("condorcet_rule(CONDORCET3)", _names(c3, condorcet_rule(c3).winners), {"a", "b", "c", "d"})

    hikers = fixture("HIKERS")
    check("median(HIKERS)", _names(hikers, median_rule(hikers, ("l", "m", "s")).winners), {"m"})

    zw = fixture("ZWICKER")
    borda_lex = parse_rule("borda+lex")
    check("Borda+lex(ZWICKER)", _names(zw, borda_lex(zw)), {"e"})
    check("Borda score e", borda(zw).scores[zw.index("e")], 17)
    found = [find_manipulation(borda_lex, zw, i) for i in range(zw.n)]
    electing_d = [w for w in found if w is not None and zw.labels[w.outcome_strategic] == "d"]
    check("ZWICKER manipulation electing d", bool(electing_d), True)

    spr = fixture("SP_RESOLUTE")
    plur_lex = parse_rule("plurality+lex")
    check("plurality+lex(SP_RESOLUTE)", _names(spr, plur_lex(spr)), {"a"})
    w = find_manipulation(plur_lex, spr, 2)
    check("SP_RESOLUTE voter 3 manipulation", w and spr.labels[w.outcome_strategic], "b")

    fal = fixture("FALISZ")
    check("chamberlin_courant(FALISZ,2)", _committees(fal, chamberlin_courant(fal, 2).committees),
          {frozenset("ac")})
    pav = pav_k(fal, 2)
    check("pav_k(FALISZ,2)", _committees(fal, pav.committees), {frozenset("ab")})
    check("pav_k score", pav.scores[frozenset({0, 1})], Fraction(13, 2))
    check("best_k plurality(FALISZ,2)", _committees(fal, best_k("plurality", fal, 2).committees),
          {frozenset("ca"), frozenset("cb"), frozenset("cd"), frozenset("ce")})
    check("{b,c} in cstv parallel",
          frozenset("bc") in _committees(fal, cstv(fal, 2, CSTVMode.PARALLEL).committees), True)

    bar = fixture("BARBERA")
    for kk, want in [(1, {frozenset("a")}), (2, {frozenset("ab")}), (3, {frozenset("cde")})]:
        check(f"condorcet_committees(BARBERA,{kk})", _committees(bar, condorcet_committees(bar, kk)), want)

    ok = _verdict(criterion_line, 1, bad, time.perf_counter() - start, 1.0)
    assert ok, bad


def test_criterion_2_jury_exact(criterion_line):
    start = time.perf_counter()
    bad = []
    for p in JURY_GRID:
        seq = jury_accuracy_recursive(21, p)
        if [n for n, _ in seq] != list(ODD_N):
            bad.append(f"recursive index set at p={p}")
        for n, value in seq:
            if value != jury_accuracy(n, p):
                bad.append(f"recursion differs at n={n}, p={p}")
        values = [v for _, v in seq]
        if any(a > b for a, b in zip(values, values[1:])):
            bad.append(f"not monotone at p={p}")
        if any(v < p for v in values):
            bad.append(f"below p at p={p}")
    if jury_accuracy(3, Fraction(2, 3)) != Fraction(20, 27):
        bad.append("p(3) at 2/3 is not 20/27")
    half = Fraction(1, 2)
    if any(v != half for _, v in jury_accuracy_recursive(21, half)):
        bad.append("p=1/2 sequence not constant")
    ok = _verdict(criterion_line, 2, bad, time.perf_counter() - start, 1.0)
    assert ok, bad


def test_criterion_3_impossibility_census(criterion_line):
    bad = []
    timings = []

    t0 = time.perf_counter()
    r = impossibility_search(2, 2, "SCF", ["ANONYMOUS", "NEUTRAL", "RESOLUTE"])
    t = time.perf_counter() - t0
    timings.append(f"(2,2) {t:.2f}s")
    if r.status != "UNSAT" or r.tables != 16:
        bad.append(f"(2,2): {r.status} over {r.tables} tables")
    if t >= 1:
        bad.append("(2,2) runtime")

    t0 = time.perf_counter()
    r = impossibility_search(3, 2, "SCF", ["RESOLUTE", "ANONYMOUS", "NEUTRAL", "MONOTONIC"])
    t = time.perf_counter() - t0
    timings.append(f"(3,2) {t:.2f}s")
    plur = parse_rule("plurality")
    if r.count != 1 or r.tables != 256:
        bad.append(f"(3,2): census {r.count} over {r.tables} tables")
    elif any(r.witnesses[0](p) != plur(p) for p in enumerate_profiles(3, 2)):
        bad.append("(3,2) table differs from plurality")
    if t >= 1:
        bad.append("(3,2) runtime")

    t0 = time.perf_counter()
    r = impossibility_search(2, 3, "SCF", ["RESOLUTE", "NON_IMPOSED", "STRATEGY_PROOF"])
    t = time.perf_counter() - t0
    timings.append(f"(2,3) {t:.2f}s")
    dictators = [RuleHandle("dictatorship", (i,)) for i in range(2)]
    profiles = list(enumerate_profiles(2, 3))
    matched = sorted(i for w in r.witnesses for i, d in enumerate(dictators)
                     if all(w(p) == d(p) for p in profiles))
    if r.count != 2 or matched != [0, 1] or r.method != "backtracking":
        bad.append(f"(2,3): census {r.count}, dictators matched {matched}, method {r.method}")
    if t >= 600:
        bad.append("(2,3) runtime")

    detail = ", ".join(timings)
    if bad:
        detail += "; failed: " + "; ".join(bad)
    assert criterion_line(3, not bad, detail), bad


def test_criterion_4_characterizations(criterion_line):
    bad = []
    timings = []
    profiles33 = list(enumerate_profiles(3, 3))
    if len(profiles33) != 216:
        bad.append(f"{len(profiles33)} profiles at (3,3)")
    targets = [
        (ConsensusClass.UNANIMOUS, DistanceId.DISCRETE, parse_rule("plurality")),
        (ConsensusClass.UNANIMOUS, DistanceId.SWAP, parse_rule("borda")),
        (ConsensusClass.STRONG_UNANIMOUS, DistanceId.SWAP, parse_rule("kemeny")),
        (ConsensusClass.CONDORCET, DistanceId.SWAP, parse_rule("dodgson")),
    ]
    for cls, dist, rule in targets:
        t0 = time.perf_counter()
        mismatches = [p for p in profiles33 if closest_consensus(p, cls, dist).winners != rule(p)]
        t = time.perf_counter() - t0
        timings.append(f"{cls.value}/{dist.value} {t:.2f}s")
        if mismatches:
            bad.append(f"{cls.value}/{dist.value} vs {rule.spec()}: {len(mismatches)} mismatches")
        if t >= 10:
            bad.append(f"{cls.value}/{dist.value} runtime")

    if any(kemeny(p).winners != plurality(p).winners for p in enumerate_profiles(3, 2)):
        bad.append("kemeny != plurality at (3,2)")
    for n, m in [(3, 3), (2, 4)]:
        if any(symmetric_borda(p).winners != borda(p).winners for p in enumerate_profiles(n, m)):
            bad.append(f"symmetric Borda != Borda at ({n},{m})")
    if any(borda_mle_winners(p) != borda(p).winners for p in profiles33):
        bad.append("Borda MLE != Borda at (3,3)")
    p = Fraction(2, 3)
    for seed in range(100):
        ts = sample_tournament_profile((0, 1, 2, 3), p, 5, seed)
        if mle_rankings(ts, p)[0] != min_disagreement_rankings(ts)[0]:
            bad.append(f"MLE != swap argmin at seed {seed}")
            break

    detail = ", ".join(timings)
    if bad:
        detail += "; failed: " + "; ".join(bad)
    assert criterion_line(4, not bad, detail), bad


def test_criterion_5_black(criterion_line):
    start = time.perf_counter()
    bad = []
    odd = black_suite(3, 3)
    if odd.profiles != 64:
        bad.append(f"{odd.profiles} single-peaked (3,3) profiles")
    if odd.transitive_failures:
        bad.append(f"(3,3) majority graph intransitive on {len(odd.transitive_failures)} profiles")
    if odd.median_failures:
        bad.append(f"(3,3) median != Condorcet winner on {len(odd.median_failures)} profiles")
    if odd.manipulations:
        bad.append(f"(3,3) {len(odd.manipulations)} single-peaked manipulations")
    even = black_suite(4, 3)
    if even.transitive_failures:
        first = even.transitive_failures[0]
        bad.append(f"(4,3) weak majority relation intransitive on {len(even.transitive_failures)} "
                   f"of {even.profiles} profiles, e.g. {_show(first)} (strict part intransitive on "
                   f"{len(even.strict_transitive_failures)})")
    if even.median_failures:
        bad.append(f"(4,3) median not within weak Condorcet winners on {len(even.median_failures)} profiles")
    ok = _verdict(criterion_line, 5, bad, time.perf_counter() - start, 5.0)
    assert ok, bad


def _family(n, members):
    return CoalitionFamily(n, frozenset(members), {})


def test_criterion_6_ultrafilters(criterion_line):
    start = time.perf_counter()
    bad = []
    for d in range(3):
        fam = decisive_coalitions(spf_of(RuleHandle("dictatorship", (d,))), 3, 3)
        rep = ultrafilter_check(fam)
        if not (rep.is_ultrafilter and rep.superset_closed and rep.principal == frozenset({d})):
            bad.append(f"dictatorship({d}) SPF not a principal ultrafilter at {d}")

    rep = ultrafilter_check(decisive_coalitions(spf_of(parse_rule("plurality")), 3, 2))
    if rep.intersection_closed or (frozenset({0, 1}), frozenset({1, 2})) not in rep.intersection_failures:
        bad.append("plurality SPF (3,2) lacks the {0,1} and {1,2} intersection failure")

    for n in (1, 2, 3):
        all_c = coalitions(n)
        for size in range(len(all_c) + 1):
            for members in itertools.combinations(all_c, size):
                rep = ultrafilter_check(_family(n, members))
                if rep.is_ultrafilter and not rep.superset_closed:
                    bad.append(f"family {members} passes i-iii but is not superset closed")

    res = impossibility_search(2, 3, "SPF", ["PARETO", "IIA"])
    if res.count == 0:
        bad.append("no Pareto+IIA SPF at (2,3)")
    for spf in res.witnesses:
        fam = decisive_coalitions(spf, 2, 3)
        for pair, family in fam.per_pair.items():
            if not family <= fam.members:
                bad.append(f"contagion fails for pair {pair}")
    ok = _verdict(criterion_line, 6, bad, time.perf_counter() - start, 30.0)
    assert ok, bad


def test_criterion_7_substituted_properties(criterion_line):
    bad = []
    for p in JURY_GRID:
        for n in ODD_N:
            if 1 - float(jury_accuracy(n, p)) > hoeffding_bound(n, p):
                bad.append(f"Hoeffding bound violated at n={n}, p={p}")
    notes = []
    for space in (StrategySpace.TOP_ONLY, StrategySpace.FULL_ORDERS):
        plur = dynamic_poa(parse_rule("plurality+lex"), 3, 3, space)
        bor = dynamic_poa(parse_rule("borda+lex"), 3, 3, space)
        again = dynamic_poa(parse_rule("borda+lex"), 3, 3, space)
        if (again.value, again.true_profile, again.equilibrium) != (bor.value, bor.true_profile, bor.equilibrium):
            bad.append(f"{space.value}: PoA witness not reproducible")
        notes.append(f"{space.value}: Borda {bor.value} vs plurality {plur.value}")
        if not bor.value <= plur.value:
            bad.append(f"{space.value}: PoA(Borda+lex)={bor.value} > PoA(plurality+lex)={plur.value} "
                       f"(witness {_show(bor.true_profile)} -> {_show(bor.equilibrium)})")
    detail = "; ".join(notes)
    if bad:
        detail += "; failed: " + "; ".join(bad)
    assert criterion_line(7, not bad, detail), bad


CLI_RUNS = [
    ["elect", "--rule", "plurality", "--fixture", "PLINY"],
    ["tournament", "--fixture", "PLINY"],
    ["elect", "--rule", "borda", "--fixture", "GORE"],
    ["elect", "--rule", "kemeny", "--fixture", "YOUNG"],
    ["elect", "--rule", "runoff", "--fixture", "RUNOFF_A", "--trace"],
    ["elect", "--rule", "runoff", "--fixture", "RUNOFF_B"],
    ["elect", "--rule", "copeland", "--fixture", "CONDORCET3"],
    ["elect", "--rule", "condorcet", "--fixture", "CONDORCET3"],
    ["elect", "--rule", "median:l>m>s", "--fixture", "HIKERS"],
    ["manipulate", "--rule", "borda+lex", "--fixture", "ZWICKER", "--voter", "0"],
    ["manipulate", "--rule", "plurality+lex", "--fixture", "SP_RESOLUTE", "--voter", "2"],
    ["committee", "--rule", "chco", "--k", "2", "--fixture", "FALISZ"],
    ["committee", "--rule", "pav", "--k", "2", "--fixture", "FALISZ"],
    ["committee", "--rule", "best-plurality", "--k", "2", "--fixture", "FALISZ"],
    ["committee", "--rule", "cstv", "--k", "2", "--mode", "parallel", "--fixture", "FALISZ"],
    ["committee", "--rule", "condorcet", "--k", "3", "--fixture", "BARBERA"],
    ["jury", "--p", "2/3", "--n-max", "21"],
    ["jury", "--p", "9/10", "--n-max", "21", "--simulate", "120000", "--seed", "7"],
    ["impossibility", "--n", "2", "--m", "2", "--axioms", "anonymous,neutral,resolute"],
    ["impossibility", "--n", "3", "--m", "2", "--axioms", "resolute,anonymous,neutral,monotonic"],
    ["impossibility", "--n", "2", "--m", "3", "--axioms", "resolute,non-imposed,strategy-proof"],
    ["impossibility", "--n", "2", "--m", "3", "--kind", "spf", "--axioms", "pareto,iia"],
    ["consensus", "--class", "c", "--distance", "swap", "--fixture", "CONDORCET1"],
    ["axiom", "--rule", "plurality", "--axiom", "monotonic", "--n", "3", "--m", "2"],
    ["axiom", "--rule", "odd", "--axiom", "neutral", "--n", "3", "--m", "2"],
]


def _cli(argv):
    proc = subprocess.run([sys.executable, "-m", "scrutineer", *argv], capture_output=True)
    return proc.returncode, proc.stdout


def test_criterion_8_cli_determinism(criterion_line):
    start = time.perf_counter()
    bad = []
    for argv in CLI_RUNS:
        first = _cli(argv + ["--jobs", "1"])
        if first[0] != 0:
            bad.append(f"{' '.join(argv)} exited {first[0]}")
            continue
        for extra in (["--jobs", "1"], ["--jobs", "2"], ["--jobs", "4"]):
            if _cli(argv + extra) != first:
                bad.append(f"{' '.join(argv)} differs with {' '.join(extra)}")
    detail = f"{len(CLI_RUNS)} invocations x 4 runs in {time.perf_counter() - start:.1f}s"
    if bad:
        detail += "; failed: " + "; ".join(bad)
    assert criterion_line(8, not bad, detail), bad
