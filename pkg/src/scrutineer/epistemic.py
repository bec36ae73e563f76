"""Jury theorem arithmetic, the pairwise noise model and maximum-likelihood rankings.

Closed forms use :class:`fractions.Fraction` throughout. Only the Monte-Carlo
estimate touches floating point; it draws from numpy's Philox counter-based
generator so that a seed fixes the whole stream of draws.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BudgetExceeded, ScrutineerError, all_ballots
from .tournaments import Tournament

SIM_CHUNK = 50_000


def as_fraction(p):
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ScrutineerError(f"probability must lie in [0, 1], got {p}")
    return p


def _require_odd(n):
    if n < 1 or n % 2 == 0:
        raise ScrutineerError(f"n must be a positive odd integer, got {n}")


def jury_accuracy(n, p):
    """Probability that a majority of ``n`` independent voters is correct."""
    _require_odd(n)
    p = as_fraction(p)
    q = 1 - p
    return sum((math.comb(n, h) * p**h * q ** (n - h) for h in range((n + 1) // 2, n + 1)), Fraction(0))


def jury_accuracy_recursive(n_max, p):
    """``[(1, p(1)), (3, p(3)), ...]`` built with the two-step increment."""
    _require_odd(n_max)
    p = as_fraction(p)
    out = [(1, p)]
    value = p
    for n in range(1, n_max - 1, 2):
        h = (n + 1) // 2
        value = value + (2 * p - 1) * math.comb(n, h) * (p * (1 - p)) ** h
        out.append((n + 2, value))
    return out


def hoeffding_bound(n, p):
    """``exp(-2 n (p - 1/2)^2)`` as a float."""
    return math.exp(-2 * n * float(Fraction(p) - Fraction(1, 2)) ** 2)


@dataclass(frozen=True)
class Estimate:
    estimate: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int


def _generator(seed, stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _simulate_chunk(args):
    n, p, size, seed, chunk = args
    rng = _generator(seed, chunk)
    correct = (rng.random((size, n)) < p).sum(axis=1)
    wins = int((2 * correct > n).sum())
    ties = int((2 * correct == n).sum())
    return 2 * wins + ties  # in half-units; a tie counts as a coin flip


def jury_simulate(n, p, trials, seed, jobs=1):
    """Monte-Carlo estimate of majority accuracy with a 95% normal interval.

    Trials are cut into fixed chunks, each with its own stream derived from
    ``(seed, chunk)``, so the result does not depend on ``jobs``.
    """
    if trials < 1:
        raise ScrutineerError("need at least one trial")
    if n < 1:
        raise ScrutineerError("need at least one voter")
    pf = float(as_fraction(p))
    tasks = []
    for chunk, start in enumerate(range(0, trials, SIM_CHUNK)):
        tasks.append((n, pf, min(SIM_CHUNK, trials - start), seed, chunk))
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            halves = list(pool.map(_simulate_chunk, tasks))
    else:
        halves = [_simulate_chunk(t) for t in tasks]
    est = sum(halves) / (2 * trials)
    half_width = 1.959963984540054 * math.sqrt(max(est * (1 - est), 0.0) / trials)
    return Estimate(est, max(0.0, est - half_width), min(1.0, est + half_width), trials, seed)


def order_tournament(order):
    """The tournament induced by a linear order."""
    return Tournament(len(order), frozenset(
        (order[i], order[j]) for i, j in itertools.combinations(range(len(order)), 2)))


def sample_tournament_profile(true_order, p, n, seed):
    """``n`` noisy tournaments; each pairwise opinion agrees with ``true_order`` w.p. ``p``.

    Draws are taken voter by voter, and within a voter pair by pair in the
    order of ``itertools.combinations(true_order, 2)``.
    """
    p = as_fraction(p)
    if p <= Fraction(1, 2):
        raise ScrutineerError("the noise model needs p > 1/2")
    m = len(true_order)
    pairs = list(itertools.combinations(true_order, 2))
    rng = _generator(seed, 0)
    draws = rng.random((n, len(pairs)))
    pf = float(p)
    out = []
    for row in draws:
        edges = frozenset((x, y) if u < pf else (y, x) for (x, y), u in zip(pairs, row))
        out.append(Tournament(m, edges))
    return out


def disagreements(order, tournament):
    """Pairs the tournament orients against ``order``."""
    pos = {x: k for k, x in enumerate(order)}
    return sum(1 for x, y in tournament.beats if pos[x] > pos[y])


def likelihood(order, tournaments, p):
    """Exact probability of observing ``tournaments`` when ``order`` is correct."""
    p = as_fraction(p)
    pairs = len(order) * (len(order) - 1) // 2
    out = Fraction(1)
    for t in tournaments:
        d = disagreements(order, t)
        out *= p ** (pairs - d) * (1 - p) ** d
    return out


def _check_m(m, max_m):
    if m > max_m:
        raise BudgetExceeded(f"{m}! candidate orders exceed the budget (max m = {max_m})")


def mle_rankings(tournaments, p, max_m=8):
    """Orders maximizing the exact likelihood, with their likelihood."""
    m = tournaments[0].m
    _check_m(m, max_m)
    scores = {o: likelihood(o, tournaments, p) for o in all_ballots(m)}
    best = max(scores.values())
    return frozenset(o for o, s in scores.items() if s == best), best


def min_disagreement_rankings(tournaments, max_m=8):
    m = tournaments[0].m
    _check_m(m, max_m)
    totals = {o: sum(disagreements(o, t) for t in tournaments) for o in all_ballots(m)}
    best = min(totals.values())
    return frozenset(o for o, s in totals.items() if s == best), best


def borda_mle_winners(profile):
    """Winners maximizing the likelihood under ``Pr(rank k | winner x) ~ 2^(m-k)``."""
    m = profile.m
    norm = sum(Fraction(2) ** (m - k) for k in range(1, m + 1))
    lik = {}
    for x in profile.alternatives:
        value = Fraction(1)
        for b in profile.ballots:
            value *= Fraction(2) ** (m - (b.index(x) + 1)) / norm
        lik[x] = value
    best = max(lik.values())
    return frozenset(x for x, v in lik.items() if v == best)
