"""``scrutineer`` command-line front end.

JSON goes to stdout with sorted keys, diagnostics to stderr. Exit codes:
0 success, 1 validation or domain error, 2 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import axioms as ax
from . import consensus as cons
from . import epistemic as epi
from . import multiwinner as mw
from . import strategy as st
from .core import (
    BudgetExceeded,
    Profile,
    ScrutineerError,
    WeakOrder,
    parse_ballot,
    parse_profile,
    render_profile,
)
from .fixtures import FIXTURE_NAMES, fixture
from .rules import parse_rule
from .tournaments import (
    condorcet_winner,
    is_transitive,
    majority_graph,
    mcgarvey_realize,
    net_matrix,
    parse_tournament,
)


class UsageError(ScrutineerError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _labels(profile_or_labels, xs):
    labels = profile_or_labels.labels if isinstance(profile_or_labels, Profile) else profile_or_labels
    return [labels[x] for x in sorted(xs)]


def _ballot(labels, b):
    return ">".join(labels[x] for x in b)


def _weak(labels, w):
    return w.render(labels)


def _emit(obj, out):
    out.write(json.dumps(obj, sort_keys=True, indent=None, separators=(",", ":")) + "\n")


def _load_profile(args):
    if getattr(args, "fixture", None):
        return fixture(args.fixture)
    if not getattr(args, "profile", None):
        raise UsageError("give --profile FILE or --fixture NAME")
    return _read_profile(args.profile)


def _read_profile(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_profile(fh.read())
    except OSError as exc:
        raise ScrutineerError(f"cannot read {path}: {exc.strerror}") from None


def _scores(labels, scores):
    return {labels[x]: rational(s) for x, s in scores.items()}


def _trace(labels, trace):
    out = []
    for row in trace:
        item = {}
        for key, val in row.items():
            if key == "scores":
                item[key] = _scores(labels, val)
            elif key in ("eliminated", "elected", "remaining", "fill", "winners", "chosen"):
                item[key] = [labels[x] for x in val]
            elif key == "action":
                item[key] = [val[0], labels[val[1]]]
            else:
                item[key] = val
        out.append(item)
    return out


# --- commands ------------------------------------------------------------

def cmd_elect(args, out):
    prof = _load_profile(args)
    rule = parse_rule(args.rule, args.tiebreak)
    res = rule.evaluate(prof)
    winners = rule.tiebreak.apply(res.winners)
    obj = {"winners": _labels(prof, winners)}
    if res.scores is not None:
        obj["scores"] = _scores(prof.labels, res.scores)
    if "orders" in res.extras:
        obj["orders"] = [_ballot(prof.labels, o) for o in res.extras["orders"]]
    if "distance" in res.extras:
        obj["distance"] = res.extras["distance"]
    if args.trace and res.trace is not None:
        obj["trace"] = _trace(prof.labels, res.trace)
    _emit(obj, out)


def _committee_key(labels, c):
    return ",".join(_labels(labels, c))


def cmd_committee(args, out):
    prof = _load_profile(args)
    k = args.k
    name = args.rule
    if name == "cstv":
        res = mw.cstv(prof, k, args.mode, args.branch_budget)
    elif name == "seq-plurality":
        res = mw.sequential_plurality(prof, k, args.tiebreak or "none")
    elif name == "condorcet":
        found = mw.condorcet_committees(prof, k)
        _emit({"committees": sorted(_labels(prof, c) for c in found)}, out)
        return
    elif name in mw.COMMITTEE_RULES:
        res = mw.CommitteeRule(name).evaluate(prof, k)
    else:
        raise UsageError(f"unknown committee rule {name!r}")
    obj = {"committees": sorted(_labels(prof, c) for c in res.committees)}
    if res.scores is not None:
        obj["scores"] = {_committee_key(prof.labels, c) if isinstance(c, frozenset) else prof.labels[c]:
                         rational(s) for c, s in res.scores.items()}
    if name == "cstv":
        obj["exhausted"] = res.exhausted
        obj["quota"] = mw.droop_quota(prof.n, k)
    if args.trace and res.trace is not None:
        obj["trace"] = _trace(prof.labels, res.trace)
    _emit(obj, out)


def _witness_json(w, labels):
    obj = {}
    for key, val in w.items():
        if key == "profiles":
            obj[key] = [render_profile(p, runs=True) for p in val]
        elif key == "outputs":
            obj[key] = [_weak(labels, v) if isinstance(v, WeakOrder) else _labels(labels, v) for v in val]
        elif key in ("dominated", "dominator", "top", "alternative", "x", "y", "never", "condorcet_winner"):
            obj[key] = labels[val]
        elif key in ("truthful", "strategic"):
            obj[key] = _ballot(labels, val)
        elif key == "assignment":
            obj[key] = {str(i): [labels[x] for x in p] for i, p in val.items()}
        else:
            obj[key] = val
    return obj


def cmd_axiom(args, out):
    rule = parse_rule(args.rule, args.tiebreak)
    axiom = ax.AxiomId.parse(args.axiom)
    if args.profiles:
        profiles = [_read_profile(p) for p in args.profiles]
        report = ax.check_axiom(rule, axiom, profiles=profiles, jobs=args.jobs)
        labels = profiles[0].labels
    else:
        if args.n is None or args.m is None:
            raise UsageError("axiom needs --n and --m (or --profiles)")
        report = ax.check_axiom(rule, axiom, args.n, args.m, jobs=args.jobs)
        from .core import default_labels

        labels = default_labels(args.m)
    obj = {"axiom": axiom.value, "rule": rule.spec(), "verdict": report.verdict,
           "profiles_checked": report.checked}
    if report.witness is not None:
        obj["witness"] = _witness_json(report.witness, labels)
    _emit(obj, out)


def _table_json(handle, n, m):
    from .core import default_labels, enumerate_profiles

    labels = default_labels(m)
    rows = {}
    for p in enumerate_profiles(n, m, labels):
        key = ",".join("".join(labels[x] for x in b) for b in p.ballots)
        v = handle(p)
        rows[key] = _weak(labels, v) if isinstance(v, WeakOrder) else _labels(labels, v)
    return rows


def cmd_impossibility(args, out):
    axioms = [a for a in args.axioms.split(",") if a.strip()]
    res = ax.impossibility_search(args.n, args.m, args.kind, axioms, jobs=args.jobs)
    obj = {"status": res.status, "count": res.count, "method": res.method,
           "kind": args.kind.upper(), "n": args.n, "m": args.m,
           "axioms": [a.value for a in res.axioms]}
    if res.witnesses:
        obj["witnesses"] = [_table_json(w, args.n, args.m) for w in res.witnesses]
        if args.kind.upper() == "SCF":
            obj["identified"] = [ax.identify_table(w, args.n, args.m) for w in res.witnesses]
    _emit(obj, out)


def _witness_manip(prof, w):
    labels = prof.labels
    return {"voter": w.voter, "truthful": _ballot(labels, w.truthful),
            "strategic": _ballot(labels, w.strategic),
            "outcome_truthful": labels[w.outcome_truthful],
            "outcome_strategic": labels[w.outcome_strategic],
            "profile": render_profile(prof.with_ballot(w.voter, w.strategic), runs=True)}


def cmd_manipulate(args, out):
    prof = _load_profile(args)
    rule = parse_rule(args.rule, args.tiebreak or "lex")
    if not 0 <= args.voter < prof.n:
        raise UsageError(f"voter index must lie in 0..{prof.n - 1}")
    if args.greedy:
        if args.target is None:
            raise UsageError("--greedy needs --target X")
        x = prof.index(args.target)
        rest = prof.without_voter(args.voter)
        ballot = st.greedy_manipulation(rule, rest, x)
        obj = {"target": args.target, "ballot": None if ballot is None else _ballot(prof.labels, ballot)}
        if ballot is not None:
            obj["winner"] = _labels(prof, rule(prof.with_ballot(args.voter, ballot)))
        _emit(obj, out)
        return
    if args.info_set:
        profiles = [prof] + [_read_profile(p) for p in args.info_set]
        b = st.dominating_manipulation(rule, st.InformationSet(args.voter, profiles))
        _emit({"dominating": None if b is None else _ballot(prof.labels, b)}, out)
        return
    w = st.find_manipulation(rule, prof, args.voter)
    obj = {"rule": rule.spec(), "manipulable": w is not None,
           "outcome": _labels(prof, rule(prof))}
    if w is not None:
        obj["witness"] = _witness_manip(prof, w)
    _emit(obj, out)


def _state_json(game, state):
    labels = game.true_profile.labels
    return [_ballot(labels, game.ballot(i, s)) for i, s in enumerate(state)]


def cmd_game(args, out):
    space = st.StrategySpace(args.space)
    rule = parse_rule(args.rule, "lex")
    best_only = args.dynamics == "best"
    if args.report == "poa" and args.profile is None and args.fixture is None:
        if args.n is None or args.m is None:
            raise UsageError("domain price of anarchy needs --n and --m")
        res = st.dynamic_poa(rule, args.n, args.m, space, best_only, convention=args.convention)
        obj = {"convention": args.convention, "poa": rational(res.value), "profiles": res.profiles, "skipped_zero": res.skipped_zero,
               "true_profile": render_profile(res.true_profile, runs=True),
               "equilibrium": render_profile(res.equilibrium, runs=True)}
        _emit(obj, out)
        return
    prof = _load_profile(args)
    game = st.VotingGame(prof, rule, space)
    labels = prof.labels
    truthful = game.truthful()
    start = game.outcome(truthful)
    if args.report == "nash":
        moves = [{"voter": i, "profile": _state_json(game, s), "winner": labels[game.outcome(s)]}
                 for i, s in game.deviations(truthful, best_only)]
        eqs = st.reachable_equilibria(game, best_only=best_only)
        obj = {"truthful_winner": labels[start], "deviations": moves,
               "equilibria": [{"profile": _state_json(game, s), "winner": labels[game.outcome(s)]}
                              for s in sorted(eqs)]}
    else:
        weights = rule.score_vector(prof.m)
        if weights is None:
            raise UsageError("price of anarchy needs a positional scoring rule")
        num = ax_scores(prof, weights)[start]
        ratios = []
        for s in st.reachable_equilibria(game, best_only=best_only):
            played = game.played(s)
            den = ax_scores(played, weights)[game.outcome(s)]
            if den:
                ratios.append((Fraction(num) / den, s))
        ratios.sort()
        obj = {"truthful_winner": labels[start]}
        if ratios:
            obj["poa"] = rational(ratios[0][0])
            obj["equilibrium"] = _state_json(game, ratios[0][1])
    _emit(obj, out)


def ax_scores(profile, weights):
    from .rules import positional_scores

    return positional_scores(profile, weights)


def cmd_jury(args, out):
    p = Fraction(args.p)
    exact = epi.jury_accuracy_recursive(args.n_max, p)
    rows = []
    for n, value in exact:
        row = {"n": n, "exact": rational(value)}
        if args.simulate:
            est = epi.jury_simulate(n, p, args.simulate, args.seed, jobs=args.jobs)
            row.update(estimate=f"{est.estimate:.6f}", ci_low=f"{est.ci_low:.6f}",
                       ci_high=f"{est.ci_high:.6f}", seed=args.seed)
        rows.append(row)
    if args.format == "json":
        _emit({"p": rational(p), "rows": rows}, out)
        return
    cols = ["n", "exact"] + (["estimate", "ci_low", "ci_high", "seed"] if args.simulate else [])
    out.write(",".join(cols) + "\n")
    for row in rows:
        out.write(",".join(str(row[c]) for c in cols) + "\n")


def cmd_consensus(args, out):
    prof = _load_profile(args)
    res = cons.closest_consensus(prof, args.cls, args.distance)
    obj = {"class": args.cls, "distance_id": args.distance, "distance": res.distance,
           "winners": _labels(prof, res.winners), "canonical_completion": res.canonical,
           "minimizers": [{"winner": prof.labels[x], "profile": render_profile(q, runs=True)}
                          for q, x in res.profiles]}
    _emit(obj, out)


def cmd_tournament(args, out):
    prof = _load_profile(args)
    labels = prof.labels
    strict = majority_graph(prof)
    weak = majority_graph(prof, weak=True)
    nm = net_matrix(prof)
    obj = {"edges": [f"{labels[x]}>{labels[y]}" for x, y in strict.edges()],
           "weak_edges": [f"{labels[x]}>{labels[y]}" for x, y in weak.edges()],
           "net": {f"{labels[x]}>{labels[y]}": nm[x][y]
                   for x in prof.alternatives for y in prof.alternatives if x != y},
           "condorcet_winner": _labels(prof, condorcet_winner(prof)),
           "weak_condorcet_winners": _labels(prof, condorcet_winner(prof, weak=True)),
           "transitive": is_transitive(strict), "weak_transitive": is_transitive(weak)}
    _emit(obj, out)


def cmd_mcgarvey(args, out):
    try:
        with open(args.tournament, encoding="utf-8") as fh:
            t, labels = parse_tournament(fh.read())
    except OSError as exc:
        raise ScrutineerError(f"cannot read {args.tournament}: {exc.strerror}") from None
    out.write(render_profile(mcgarvey_realize(t, labels)))


def cmd_fixtures(args, out):
    if args.name is None:
        out.write("\n".join(FIXTURE_NAMES) + "\n")
        return
    out.write(render_profile(fixture(args.name)))


# --- parser --------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="scrutineer", description="Exact computational social choice toolkit.")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for searches")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def profile_args(p):
        p.add_argument("--profile", help="profile file")
        p.add_argument("--fixture", help="named example profile instead of a file")

    def jobs(p):
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("elect", help="run a single-winner rule")
    p.add_argument("--rule", required=True)
    profile_args(p)
    p.add_argument("--tiebreak", choices=["none", "lex"])
    p.add_argument("--trace", action="store_true")
    jobs(p)
    p.set_defaults(func=cmd_elect)

    p = sub.add_parser("committee", help="run a committee rule")
    p.add_argument("--rule", required=True,
                   choices=list(mw.COMMITTEE_RULES) + ["condorcet"])
    p.add_argument("--k", type=int, required=True)
    profile_args(p)
    p.add_argument("--mode", choices=["canonical", "parallel"], default="canonical")
    p.add_argument("--branch-budget", type=int, default=10**5)
    p.add_argument("--tiebreak", choices=["none", "lex"])
    p.add_argument("--trace", action="store_true")
    jobs(p)
    p.set_defaults(func=cmd_committee)

    p = sub.add_parser("axiom", help="check an axiom over a domain")
    p.add_argument("--rule", required=True)
    p.add_argument("--axiom", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--profiles", nargs="+", help="explicit domain of profile files")
    p.add_argument("--tiebreak", choices=["none", "lex"])
    jobs(p)
    p.set_defaults(func=cmd_axiom)

    p = sub.add_parser("impossibility", help="census of functions meeting a set of axioms")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--kind", choices=["scf", "spf", "SCF", "SPF"], default="scf")
    p.add_argument("--axioms", required=True, help="comma-separated axiom ids")
    jobs(p)
    p.set_defaults(func=cmd_impossibility)

    p = sub.add_parser("manipulate", help="search for a manipulation")
    p.add_argument("--rule", required=True)
    profile_args(p)
    p.add_argument("--voter", type=int, required=True)
    p.add_argument("--tiebreak", choices=["none", "lex"])
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--target")
    p.add_argument("--info-set", nargs="+")
    jobs(p)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("game", help="iterative voting game analysis")
    p.add_argument("--rule", required=True)
    profile_args(p)
    p.add_argument("--space", choices=["top", "full"], default="top")
    p.add_argument("--report", choices=["poa", "nash"], default="nash")
    p.add_argument("--dynamics", choices=["profitable", "best"], default="profitable")
    p.add_argument("--convention", choices=["literal", "true-score"], default="literal")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    jobs(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("jury", help="jury theorem table")
    p.add_argument("--p", required=True, help="voter competence as a rational, e.g. 2/3")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--simulate", type=int, metavar="TRIALS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    jobs(p)
    p.set_defaults(func=cmd_jury)

    p = sub.add_parser("consensus", help="closest consensus profiles")
    p.add_argument("--class", dest="cls", choices=["u", "s", "c"], required=True)
    p.add_argument("--distance", choices=["swap", "discrete"], required=True)
    profile_args(p)
    jobs(p)
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("tournament", help="majority graph of a profile")
    profile_args(p)
    jobs(p)
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("mcgarvey", help="profile realizing a tournament")
    p.add_argument("--tournament", required=True)
    jobs(p)
    p.set_defaults(func=cmd_mcgarvey)

    p = sub.add_parser("fixtures", help="print a named example profile")
    p.add_argument("--name")
    jobs(p)
    p.set_defaults(func=cmd_fixtures)
    return parser


def run(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        args.func(args, out)
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        _emit({"error": "budget exceeded", "partial": True, "message": str(exc)}, out)
        return 2
    except (ScrutineerError, ValueError, ZeroDivisionError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
