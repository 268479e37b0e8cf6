"""Variance-minimal scheduler among expectation-optimal ones."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .expectation import Direction, optimize, prune_to_optimal, solve_expectation
from .mdp import Action, Mdp


@dataclass(frozen=True)
class VarianceMinSolution:
    direction: Direction
    expectation: Mapping[str, Fraction]
    variance: Mapping[str, Fraction]
    second_moment: Mapping[str, Fraction]
    scheduler: Mapping[str, str]


def min_variance_among_optimal(m: Mdp, direction: Direction = Direction.MAXIMIZE) -> VarianceMinSolution:
    """Memoryless deterministic scheduler with minimal variance among expectation-optimal ones.

    After pruning to optimal actions every scheduler has the same expectation
    ``mu``, and the variance from ``s`` is the expected total of the squared
    one-step deviations ``(wgt(s,a) + mu_t - mu_s)**2``. Minimizing that is a
    plain shortest-path problem on the pruned model, which has no end
    components. The per-successor weights are folded into the expected
    immediate reward.
    """
    sol = solve_expectation(m, direction)
    mu = sol.values
    pruned = prune_to_optimal(m, sol)

    def deviation(s: str, a: Action) -> Fraction:
        return sum((p * (a.weight + mu[t] - mu[s]) ** 2 for t, p in a.successors), Fraction(0))

    vsol = optimize(pruned, Direction.MINIMIZE, deviation)
    var = dict(vsol.values)
    second = {s: var[s] + mu[s] ** 2 for s in m.states}
    return VarianceMinSolution(direction, dict(mu), var, second, dict(vsol.witness))
