"""Exact terminal distributions, expected frequencies and moments of accumulated weight.

All routines walk the weight-unfolded chain level by level: pairs with the
same accumulated weight are linked only by zero-weight transitions, so each
level is one small exact linear solve and positive weights push mass to later
levels. Mass that reaches a weight at or above the scheduler's bound is
parked on the boundary, where the tail behaviour takes over.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .endcomponents import find_end_components
from .errors import EndComponentPresent, MissingTailValue, NegativeWeight, ZeroVisitDivision
from .mdp import Mdp
from .numeric import solve
from .schedulers import MemorylessScheduler, WeightBasedScheduler

ZERO = Fraction(0)


@dataclass(frozen=True)
class TerminalDistribution:
    bound: int
    goal_mass: Mapping[int, Fraction]
    boundary_mass: Mapping[tuple[str, int], Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.goal_mass.values(), ZERO) + sum(self.boundary_mass.values(), ZERO)


@dataclass(frozen=True)
class FrequencyTable:
    bound: int
    visits: Mapping[tuple[str, int], Fraction]
    action_visits: Mapping[tuple[str, int, str], Fraction]


@dataclass(frozen=True)
class MomentPair:
    expectation: Fraction
    variance: Fraction

    def vpe(self, lam) -> Fraction:
        return self.expectation - Fraction(lam) * self.variance


def check_supported(m: Mdp) -> None:
    """Non-negative weights and no end components."""
    if not m.nonnegative:
        raise NegativeWeight("negative weights are not supported here")
    ecs = find_end_components(m)
    if ecs:
        where = sorted(ecs[0].states, key=m.index.__getitem__)
        raise EndComponentPresent(f"end component on states {where}")


def _sweep(m: Mdp, sched: WeightBasedScheduler, count_actions: bool = False):
    bound = sched.bound
    visits: dict[tuple[str, int], Fraction] = {}
    action_visits: dict[tuple[str, int, str], Fraction] = {}
    goal_mass: dict[int, Fraction] = {}
    boundary: dict[tuple[str, int], Fraction] = {}
    if bound <= 0:
        boundary[m.init, 0] = Fraction(1)
        return visits, action_visits, goal_mass, boundary
    pending: dict[int, dict[str, Fraction]] = {0: {m.init: Fraction(1)}}
    levels = [0]
    index = m.index
    while levels:
        w = heapq.heappop(levels)
        inflow = pending.pop(w)
        # zero-weight closure of the entry states at this level
        closure = set(inflow)
        todo = list(inflow)
        has_internal = False
        while todo:
            s = todo.pop()
            if s == m.goal:
                continue
            for name in sched.dist(s, w):
                a = m.action(s, name)
                if a.weight == 0:
                    has_internal = True
                    for t, _ in a.successors:
                        if t not in closure:
                            closure.add(t)
                            todo.append(t)
        order = sorted(closure, key=index.__getitem__)
        if has_internal:
            pos = {s: i for i, s in enumerate(order)}
            k = len(order)
            mat = [[ZERO] * k for _ in range(k)]
            rhs = [inflow.get(s, ZERO) for s in order]
            for i, s in enumerate(order):
                mat[i][i] += 1
            for s in order:
                if s == m.goal:
                    continue
                j = pos[s]
                for name, q in sched.dist(s, w).items():
                    a = m.action(s, name)
                    if a.weight == 0:
                        for t, p in a.successors:
                            mat[pos[t]][j] -= q * p
            x = dict(zip(order, solve(mat, rhs)))
        else:
            x = {s: inflow.get(s, ZERO) for s in order}
        for s in order:
            xs = x[s]
            visits[s, w] = xs
            if s == m.goal:
                goal_mass[w] = goal_mass.get(w, ZERO) + xs
                continue
            for name, q in sched.dist(s, w).items():
                flow = xs * q
                if count_actions:
                    action_visits[s, w, name] = flow
                a = m.action(s, name)
                if a.weight == 0 or flow == 0:
                    continue
                w2 = w + a.weight
                for t, p in a.successors:
                    mass = flow * p
                    if w2 < bound:
                        level = pending.get(w2)
                        if level is None:
                            level = pending[w2] = {}
                            heapq.heappush(levels, w2)
                        level[t] = level.get(t, ZERO) + mass
                    else:
                        boundary[t, w2] = boundary.get((t, w2), ZERO) + mass
    return visits, action_visits, goal_mass, boundary


def terminal_distribution(m: Mdp, sched: WeightBasedScheduler, check: bool = True) -> TerminalDistribution:
    """Probabilities of reaching ``(goal, w)`` below the bound and of each boundary pair."""
    if check:
        check_supported(m)
        sched.validate(m)
    _, _, goal_mass, boundary = _sweep(m, sched)
    return TerminalDistribution(sched.bound, goal_mass, boundary)


def frequencies(m: Mdp, sched: WeightBasedScheduler, check: bool = True) -> FrequencyTable:
    """Expected number of visits to each state-weight pair below the bound."""
    if check:
        check_supported(m)
        sched.validate(m)
    visits, action_visits, _, _ = _sweep(m, sched, count_actions=True)
    return FrequencyTable(sched.bound, visits, action_visits)


def moments_from_distribution(d: TerminalDistribution, tail_e: Mapping[str, Fraction],
                              tail_q: Mapping[str, Fraction]) -> MomentPair:
    """Expectation and variance from a terminal distribution plus tail moments.

    A boundary pair ``(s, w)`` contributes ``w + e_s`` to the mean and
    ``(w - mu)**2 + 2 (w - mu) e_s + q_s`` to the variance, where ``e_s`` and
    ``q_s`` are the first two moments of the weight still to come from ``s``.
    """
    for s, _ in d.boundary_mass:
        if s not in tail_e or s not in tail_q:
            raise MissingTailValue(f"no tail moments for boundary state {s!r}")
    mu = sum((p * w for w, p in d.goal_mass.items()), ZERO)
    mu += sum((p * (w + tail_e[s]) for (s, w), p in d.boundary_mass.items()), ZERO)
    var = sum((p * (w - mu) ** 2 for w, p in d.goal_mass.items()), ZERO)
    var += sum(
        (p * ((w - mu) ** 2 + 2 * (w - mu) * tail_e[s] + tail_q[s]) for (s, w), p in d.boundary_mass.items()),
        ZERO,
    )
    return MomentPair(mu, var)


def memoryless_moments(m: Mdp, tail: MemorylessScheduler) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """First and second moment of the accumulated weight under a memoryless scheduler."""
    states = m.nongoal
    idx = {s: i for i, s in enumerate(states)}
    k = len(states)
    mat = [[ZERO] * k for _ in range(k)]
    for i, s in enumerate(states):
        mat[i][i] += 1
        for name, q in tail.dist(s).items():
            for t, p in m.action(s, name).successors:
                if t != m.goal:
                    mat[i][idx[t]] -= q * p
    b1 = [sum((q * m.action(s, name).weight for name, q in tail.dist(s).items()), ZERO) for s in states]
    e = dict(zip(states, solve(mat, b1)))
    e[m.goal] = ZERO
    b2 = []
    for s in states:
        acc = ZERO
        for name, q in tail.dist(s).items():
            a = m.action(s, name)
            acc += q * sum((p * (a.weight ** 2 + 2 * a.weight * e[t]) for t, p in a.successors), ZERO)
        b2.append(acc)
    qv = dict(zip(states, solve(mat, b2)))
    qv[m.goal] = ZERO
    return e, qv


def scheduler_moments(m: Mdp, sched: WeightBasedScheduler, check: bool = True) -> MomentPair:
    """Exact (expectation, variance) of the accumulated weight under ``sched``."""
    d = terminal_distribution(m, sched, check)
    e, q = memoryless_moments(m, sched.tail)
    return moments_from_distribution(d, e, q)


def to_weight_based(freq: FrequencyTable, tail: MemorylessScheduler) -> WeightBasedScheduler:
    """Randomized weight-based scheduler choosing each action with its frequency ratio."""
    grouped: dict[tuple[str, int], dict[str, Fraction]] = {}
    for (s, w, a), f in freq.action_visits.items():
        grouped.setdefault((s, w), {})[a] = f
    table = {}
    for key, acts in grouped.items():
        total = freq.visits.get(key, ZERO)
        if total == 0:
            if any(f != 0 for f in acts.values()):
                raise ZeroVisitDivision(f"pair {key} has action mass but no visits")
            continue
        table[key] = {a: f / total for a, f in acts.items() if f != 0}
    return WeightBasedScheduler(freq.bound, tail, table)


def mix_frequencies(f1: FrequencyTable, f2: FrequencyTable, p) -> FrequencyTable:
    p = Fraction(p)
    if f1.bound != f2.bound:
        raise ValueError("frequency tables use different bounds")

    def combine(a, b):
        keys = list(dict.fromkeys([*a, *b]))
        return {k: p * a.get(k, ZERO) + (1 - p) * b.get(k, ZERO) for k in keys}

    return FrequencyTable(f1.bound, combine(f1.visits, f2.visits), combine(f1.action_visits, f2.action_visits))


def convex_combination(m: Mdp, s1: WeightBasedScheduler, s2: WeightBasedScheduler, p) -> WeightBasedScheduler:
    """Scheduler whose frequencies are ``p * freq(s1) + (1 - p) * freq(s2)``."""
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError("p must lie strictly between 0 and 1")
    if s1.bound != s2.bound or s1.tail != s2.tail:
        raise ValueError("schedulers must share bound and tail")
    mixed = mix_frequencies(frequencies(m, s1), frequencies(m, s2), p)
    return to_weight_based(mixed, s1.tail)


def mixture_moments(m1: MomentPair, m2: MomentPair, p) -> MomentPair:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    e = p * m1.expectation + (1 - p) * m2.expectation
    v = p * m1.variance + (1 - p) * m2.variance + p * (1 - p) * (m1.expectation - m2.expectation) ** 2
    return MomentPair(e, v)
