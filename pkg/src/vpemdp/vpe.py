"""Variance-penalized expectation: saturation point, weight unfolding and exact optimization.

The optimum over all schedulers is attained by a deterministic weight-based
scheduler that, once the accumulated weight reaches the saturation point K,
follows the memoryless scheduler that minimizes variance among
expectation-minimal schedulers. Below K the choices are enumerated
exhaustively. K is usually astronomically large for stochastic models, so a
smaller enumeration bound may be supplied; results are then certified lower
bounds and flagged as inexact.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .distribution import MomentPair, TerminalDistribution, _sweep, check_supported, moments_from_distribution
from .errors import BoundTooLarge, NonPositiveLambda, TailMismatch
from .expectation import Direction, q_value, solve_expectation, weight_reward
from .mdp import Mdp
from .schedulers import MemorylessScheduler, WeightBasedScheduler, point
from .variance import min_variance_among_optimal

DEFAULT_BUDGET = 1 << 16


class Objective(enum.Enum):
    MAXIMIZE_EXPECTATION = "max"
    MINIMIZE_EXPECTATION = "min"


@dataclass(frozen=True)
class SaturationConstants:
    n: int
    W: int
    eps: Fraction
    delta: Optional[Fraction]
    U1: Fraction
    U2: Fraction
    b_half: Fraction
    B_half: Fraction
    K: int
    lam: Fraction

    @property
    def degenerate(self) -> bool:
        """Every action is expectation-minimal; the tail scheduler alone is optimal."""
        return self.delta is None


@dataclass(frozen=True)
class UnfoldedMdp:
    bound: int
    goal: str
    init: tuple[str, int]
    pairs: tuple[tuple[str, int], ...]
    transitions: Mapping[tuple[str, int], tuple[tuple[str, tuple[tuple[tuple[str, int], Fraction], ...]], ...]]
    traps: frozenset

    @property
    def decision_pairs(self) -> list[tuple[str, int]]:
        return [p for p in self.pairs if p not in self.traps and len(self.transitions[p]) > 1]

    @property
    def boundary_pairs(self) -> list[tuple[str, int]]:
        """Non-goal pairs at or above the bound, where the tail takes over."""
        return [p for p in self.pairs if p[1] >= self.bound and p not in self.goal_pairs]

    @property
    def goal_pairs(self) -> list[tuple[str, int]]:
        return [p for p in self.pairs if p[0] == self.goal]


@dataclass(frozen=True)
class VpeReport:
    """Result of a VPE evaluation or optimization.

    ``value`` is ``E - lam * V`` for the maximizing objective and
    ``-E - lam * V`` when the expectation is to be minimized.
    """

    lam: Fraction
    bound_used: int
    exact: bool
    value: Fraction
    scheduler: WeightBasedScheduler
    moments: MomentPair
    objective: Objective = Objective.MAXIMIZE_EXPECTATION


class Verdict(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    LOWER_BOUND_ONLY = "LowerBoundOnly"


@dataclass(frozen=True)
class ThresholdResult:
    verdict: Verdict
    value: Fraction
    report: VpeReport


@dataclass(frozen=True)
class FrontierRow:
    lam: Fraction
    expectation: Fraction
    variance: Fraction
    vpe: Fraction


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _check_lambda(lam) -> Fraction:
    lam = Fraction(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    return lam


def saturation_point(m: Mdp, lam) -> SaturationConstants:
    """Weight bound above which an optimal scheduler must minimize expectation."""
    lam = _check_lambda(lam)
    check_supported(m)
    n, W, eps = m.n, m.max_weight, m.min_prob
    U1 = max(solve_expectation(m, Direction.MAXIMIZE).values.values())
    minsol = solve_expectation(m, Direction.MINIMIZE)
    e = minsol.values
    gaps = [
        q_value(a, s, e, weight_reward) - e[s]
        for s in m.nongoal for a in m.actions[s] if a.name not in minsol.optimal_actions[s]
    ]
    delta = min(gaps) if gaps else None
    b_half = 1 / eps ** n
    B_half = b_half * n * W
    U2 = Fraction(2 * n * n * W * W) / eps ** (2 * n)
    K = max(_ceil(B_half), 0)
    if delta is not None:
        K = max(K, _ceil((U1 / lam + U2 + 2 * U1 + U1 ** 2 / 2) / delta + 1))
    return SaturationConstants(n, W, eps, delta, U1, U2, b_half, B_half, K, lam)


def unfold(m: Mdp, bound: int) -> UnfoldedMdp:
    """Product of ``m`` with accumulated weights, trapping at goal and at weights >= bound.

    Only pairs reachable from ``(init, 0)`` are built.
    """
    check_supported(m)
    if bound < 1:
        raise ValueError("bound must be at least 1")
    init = (m.init, 0)
    seen = {init}
    order = [init]
    todo = deque([init])
    transitions = {}
    traps = set()
    while todo:
        pair = todo.popleft()
        s, w = pair
        if s == m.goal or w >= bound:
            traps.add(pair)
            transitions[pair] = ()
            continue
        acts = []
        for a in m.actions[s]:
            succ = []
            for t, p in a.successors:
                nxt = (t, w + a.weight)
                succ.append((nxt, p))
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    todo.append(nxt)
            acts.append((a.name, tuple(succ)))
        transitions[pair] = tuple(acts)
    order.sort(key=lambda p: (p[1], m.index[p[0]]))
    return UnfoldedMdp(bound, m.goal, init, tuple(order), transitions, frozenset(traps))


def _decision_pairs(m: Mdp, bound: int, budget: int) -> list[tuple[str, int]]:
    """Reachable below-bound pairs at multi-action states, without building the full product.

    Exploration stops at pairs from which no multi-action state can be
    reached, and aborts once the assignment count exceeds ``budget``.
    """
    multi = {s for s in m.nongoal if len(m.actions[s]) > 1}
    preds: dict[str, set[str]] = {s: set() for s in m.states}
    for s in m.nongoal:
        for a in m.actions[s]:
            for t, _ in a.successors:
                preds[t].add(s)
    can_decide = set(multi)
    todo = list(multi)
    while todo:
        t = todo.pop()
        for s in preds[t]:
            if s not in can_decide:
                can_decide.add(s)
                todo.append(s)
    found = []
    count = 1
    start = (m.init, 0)
    if bound < 1 or m.init not in can_decide:
        return found
    seen = {start}
    queue = deque([start])
    while queue:
        s, w = queue.popleft()
        if s in multi:
            found.append((s, w))
            count *= len(m.actions[s])
            if count > budget:
                raise BoundTooLarge(
                    f"more than {budget} deterministic assignments below bound {bound}; "
                    f"pass a smaller bound"
                )
        for a in m.actions[s]:
            w2 = w + a.weight
            if w2 >= bound:
                continue
            for t, _ in a.successors:
                if t in can_decide and (t, w2) not in seen:
                    seen.add((t, w2))
                    queue.append((t, w2))
    found.sort(key=lambda p: (p[1], m.index[p[0]]))
    return found


def _effective_bound(table, tail: Mapping[str, str]) -> int:
    """One past the largest weight at which the table departs from the tail."""
    ws = [w for (s, w), d in table.items() if d != point(tail[s])]
    return max(ws) + 1 if ws else 0


def _evaluate(m: Mdp, lam: Fraction, table, tail_choice, tail_sched, e, q) -> MomentPair:
    bound = _effective_bound(table, tail_choice)
    sched = WeightBasedScheduler(bound, tail_sched, table)
    _, _, goal_mass, boundary = _sweep(m, sched)
    return moments_from_distribution(TerminalDistribution(bound, goal_mass, boundary), e, q)


def _objective_value(mp: MomentPair, lam: Fraction, objective: Objective) -> Fraction:
    sign = 1 if objective is Objective.MAXIMIZE_EXPECTATION else -1
    return sign * mp.expectation - lam * mp.variance


def _tail_data(m: Mdp):
    vmin = min_variance_among_optimal(m, Direction.MINIMIZE)
    tail_choice = dict(vmin.scheduler)
    return tail_choice, MemorylessScheduler.deterministic(tail_choice), vmin.expectation, vmin.second_moment


def vpe_of_scheduler(m: Mdp, lam, sched: WeightBasedScheduler,
                     objective: Objective = Objective.MAXIMIZE_EXPECTATION) -> VpeReport:
    """Exact VPE of a weight-based scheduler whose tail is the variance-minimal expectation-minimizer."""
    lam = _check_lambda(lam)
    sat = saturation_point(m, lam)
    sched.validate(m)
    tail_choice, tail_sched, e, q = _tail_data(m)
    for s in m.nongoal:
        if sched.tail.choice.get(s) != point(tail_choice[s]):
            raise TailMismatch(
                f"tail at {s!r} must be {tail_choice[s]!r} (variance-minimal expectation-minimizer)"
            )
    mp = _evaluate(m, lam, dict(sched.table), tail_choice, tail_sched, e, q)
    exact = sat.degenerate or sched.bound >= sat.K
    return VpeReport(lam, sched.bound, exact, _objective_value(mp, lam, objective), sched, mp, objective)


def _enumerate_block(args):
    m, lam, objective, pairs, choices, fixed, tail_choice, tail_sched, e, q = args
    best = None
    for combo in itertools.product(*choices[len(fixed):]):
        assignment = fixed + combo
        table = {pair: point(a) for pair, a in zip(pairs, assignment)}
        mp = _evaluate(m, lam, table, tail_choice, tail_sched, e, q)
        val = _objective_value(mp, lam, objective)
        if best is None or val > best[0]:
            best = (val, assignment, mp)
    return best


def maximize_vpe(m: Mdp, lam, bound: Optional[int] = None,
                 objective: Objective = Objective.MAXIMIZE_EXPECTATION,
                 budget: int = DEFAULT_BUDGET, jobs: int = 1) -> VpeReport:
    """Best VPE over deterministic weight-based schedulers switching to the tail at ``bound``.

    ``bound`` defaults to the saturation point, in which case the result is
    the true optimum. Ties go to the lexicographically least assignment over
    decision pairs ordered by (weight, state order).
    """
    lam = _check_lambda(lam)
    sat = saturation_point(m, lam)
    tail_choice, tail_sched, e, q = _tail_data(m)
    if bound is None:
        if sat.degenerate:
            mp = _evaluate(m, lam, {}, tail_choice, tail_sched, e, q)
            sched = WeightBasedScheduler(0, tail_sched, {})
            return VpeReport(lam, 0, True, _objective_value(mp, lam, objective), sched, mp, objective)
        bound = sat.K
    if bound < 0:
        raise ValueError("bound must be a natural number")
    pairs = _decision_pairs(m, bound, budget)
    choices = [tuple(a.name for a in m.actions[s]) for s, _ in pairs]
    common = (m, lam, objective, pairs, choices)
    if jobs > 1 and pairs:
        blocks = [common + ((a,), tail_choice, tail_sched, e, q) for a in choices[0]]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_enumerate_block, blocks))
    else:
        results = [_enumerate_block(common + ((), tail_choice, tail_sched, e, q))]
    best = None
    for r in results:
        if best is None or r[0] > best[0]:
            best = r
    val, assignment, mp = best
    table = {pair: point(a) for pair, a in zip(pairs, assignment)}
    sched = WeightBasedScheduler(bound, tail_sched, table)
    exact = sat.degenerate or bound >= sat.K
    return VpeReport(lam, bound, exact, val, sched, mp, objective)


def threshold(m: Mdp, lam, theta, bound: Optional[int] = None,
              objective: Objective = Objective.MAXIMIZE_EXPECTATION,
              budget: int = DEFAULT_BUDGET, jobs: int = 1) -> ThresholdResult:
    """Decide whether the optimal VPE reaches ``theta``.

    Below the saturation point a failure is inconclusive and is reported as
    ``LOWER_BOUND_ONLY``.
    """
    theta = Fraction(theta)
    rep = maximize_vpe(m, lam, bound, objective, budget, jobs)
    if rep.value >= theta:
        verdict = Verdict.HOLDS
    elif rep.exact:
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.LOWER_BOUND_ONLY
    return ThresholdResult(verdict, rep.value, rep)


def frontier(m: Mdp, lambdas: Sequence, bound: Optional[int] = None,
             budget: int = DEFAULT_BUDGET, jobs: int = 1) -> list[FrontierRow]:
    rows = []
    for lam in lambdas:
        rep = maximize_vpe(m, lam, bound, budget=budget, jobs=jobs)
        rows.append(FrontierRow(rep.lam, rep.moments.expectation, rep.moments.variance, rep.value))
    return rows

