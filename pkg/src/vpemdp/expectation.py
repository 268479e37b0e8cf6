"""Optimal expected accumulated weight (stochastic shortest path) by exact policy iteration."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .endcomponents import EcKind, classify_ec, find_end_components
from .errors import InfiniteExpectation, SingularMatrix, ZeroEcPresent
from .mdp import Action, Mdp
from .numeric import solve


class Direction(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.MAXIMIZE else -1


@dataclass(frozen=True)
class ExpectationSolution:
    direction: Direction
    values: Mapping[str, Fraction]
    optimal_actions: Mapping[str, tuple[str, ...]]
    witness: Mapping[str, str]


RewardFn = Callable[[str, Action], Fraction]


def weight_reward(s: str, a: Action) -> Fraction:
    return Fraction(a.weight)


def initial_proper_policy(m: Mdp) -> dict[str, Action]:
    """First action (in declaration order) that moves one step closer to goal."""
    preds: dict[str, list[str]] = {s: [] for s in m.states}
    for s in m.nongoal:
        for a in m.actions[s]:
            for t, _ in a.successors:
                preds[t].append(s)
    dist = {m.goal: 0}
    todo = deque([m.goal])
    while todo:
        t = todo.popleft()
        for s in preds[t]:
            if s not in dist:
                dist[s] = dist[t] + 1
                todo.append(s)
    policy = {}
    for s in m.nongoal:
        for a in m.actions[s]:
            if any(dist.get(t) == dist[s] - 1 for t, _ in a.successors):
                policy[s] = a
                break
    return policy


def is_proper(m: Mdp, policy: Mapping[str, Action]) -> bool:
    """Goal reachable from every state in the chain induced by ``policy``."""
    preds: dict[str, list[str]] = {s: [] for s in m.states}
    for s in m.nongoal:
        for t, _ in policy[s].successors:
            preds[t].append(s)
    seen = {m.goal}
    todo = [m.goal]
    while todo:
        t = todo.pop()
        for s in preds[t]:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return len(seen) == m.n


def evaluate_policy(m: Mdp, policy: Mapping[str, Action], reward: RewardFn = weight_reward) -> dict[str, Fraction]:
    """Expected accumulated reward until goal under a proper memoryless policy."""
    states = m.nongoal
    idx = {s: i for i, s in enumerate(states)}
    k = len(states)
    a = [[Fraction(0)] * k for _ in range(k)]
    b = [Fraction(0)] * k
    for i, s in enumerate(states):
        act = policy[s]
        a[i][i] += 1
        b[i] = reward(s, act)
        for t, p in act.successors:
            if t != m.goal:
                a[i][idx[t]] -= p
    x = solve(a, b)
    values = {s: x[idx[s]] for s in states}
    values[m.goal] = Fraction(0)
    return values


def q_value(a: Action, s: str, values: Mapping[str, Fraction], reward: RewardFn) -> Fraction:
    return reward(s, a) + sum((p * values[t] for t, p in a.successors), Fraction(0))


def optimize(m: Mdp, direction: Direction, reward: RewardFn = weight_reward) -> ExpectationSolution:
    """Policy iteration without precondition checks.

    The caller guarantees that improper policies are strictly worse than
    proper ones (no end component can be profitable to stay in).
    """
    sign = direction.sign
    policy = initial_proper_policy(m)
    while True:
        try:
            values = evaluate_policy(m, policy, reward)
        except SingularMatrix:
            raise AssertionError("policy iteration produced an improper policy") from None
        changed = False
        for s in m.nongoal:
            cur = sign * values[s]
            best, best_a = cur, None
            for a in m.actions[s]:
                q = sign * q_value(a, s, values, reward)
                if q > best:
                    best, best_a = q, a
            if best_a is not None:
                policy[s] = best_a
                changed = True
        if not changed:
            break
        if not is_proper(m, policy):
            raise AssertionError("policy iteration produced an improper policy")
    optimal = {}
    witness = {}
    for s in m.nongoal:
        acts = tuple(a.name for a in m.actions[s] if q_value(a, s, values, reward) == values[s])
        optimal[s] = acts
        witness[s] = acts[0]
    return ExpectationSolution(direction, values, optimal, witness)


def check_finite(m: Mdp, direction: Direction) -> None:
    """Reject models whose end components break the solver's assumptions."""
    for ec in find_end_components(m):
        cls = classify_ec(m, ec, direction.sign)
        where = sorted(ec.states, key=m.index.__getitem__)
        if cls.kind is EcKind.ZERO_EC:
            raise ZeroEcPresent(f"0-end-component on states {where}")
        if cls.kind is EcKind.NON_NEGATIVE:
            if cls.max_mean_payoff > 0:
                raise InfiniteExpectation(
                    f"end component on states {where} has mean payoff {cls.max_mean_payoff} "
                    f"in the {direction.value} direction; optimal expectation is infinite"
                )
            raise ZeroEcPresent(f"end component on states {where} has maximal mean payoff 0")


def solve_expectation(m: Mdp, direction: Direction = Direction.MAXIMIZE) -> ExpectationSolution:
    """Optimal expected accumulated weight from every state.

    >>> from vpemdp.mdp import load_fixture
    >>> solve_expectation(load_fixture("intro")).values["s_init"]
    Fraction(4, 1)
    """
    check_finite(m, direction)
    return optimize(m, direction)


def prune_to_optimal(m: Mdp, sol: ExpectationSolution) -> Mdp:
    pruned = m.restrict(sol.optimal_actions)
    if find_end_components(pruned):
        raise AssertionError("pruned model retains an end component")
    return pruned
