"""Independent oracles and random model generators shared by the tests.

Nothing here calls the solvers under test: linear systems are solved with
sympy, schedulers are enumerated exhaustively and path distributions are
unrolled by hand.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy

from vpemdp.mdp import build_mdp


def random_probs(rng: random.Random, k: int) -> list[Fraction]:
    cuts = sorted(rng.sample(range(1, 12), k - 1)) if k > 1 else []
    edges = [0, *cuts, 12]
    return [Fraction(b - a, 12) for a, b in zip(edges, edges[1:])]


def random_ec_free(rng: random.Random, max_states: int = 5, max_actions: int = 3, max_weight: int = 3,
                   deterministic: bool = False, min_states: int = 2):
    """Random model without end components.

    States are ``s0 .. s{k-1}`` plus ``goal``; every action moves with positive
    probability to goal or to a lower-indexed state, which rules out closed
    sub-models. ``s{k-1}`` is initial and each ``s{i+1}`` can step to ``s{i}``.
    """
    k = rng.randint(min_states, max_states) - 1
    names = [f"s{i}" for i in range(k)]
    trans = []
    for i, s in enumerate(names):
        lower = names[:i] + ["goal"]
        for j in range(rng.randint(1, max_actions)):
            down = names[i - 1] if (j == 0 and i > 0) else rng.choice(lower)
            w = rng.randint(0, max_weight)
            if deterministic:
                dist = {down: Fraction(1)}
            else:
                extra = rng.sample(names + ["goal"], rng.randint(0, 2))
                targets = list(dict.fromkeys([down, *extra]))
                dist = dict(zip(targets, random_probs(rng, len(targets))))
            trans.append((s, f"a{j}", w, dist))
    return build_mdp([*names, "goal"], names[-1], "goal", trans)


def chain_solve(m, choice, reward):
    """Solve x_s = reward(s) + sum_t P(s, choice[s], t) x_t with sympy."""
    states = m.nongoal
    idx = {s: i for i, s in enumerate(states)}
    a = sympy.eye(len(states))
    b = sympy.zeros(len(states), 1)
    for s in states:
        act = m.action(s, choice[s])
        b[idx[s]] = sympy.Rational(reward(s, act))
        for t, p in act.successors:
            if t != m.goal:
                a[idx[s], idx[t]] -= sympy.Rational(p.numerator, p.denominator)
    x = a.LUsolve(b)
    out = {s: Fraction(int(sympy.fraction(x[idx[s]])[0]), int(sympy.fraction(x[idx[s]])[1])) for s in states}
    out[m.goal] = Fraction(0)
    return out


def md_schedulers(m):
    states = m.nongoal
    for combo in itertools.product(*[[a.name for a in m.actions[s]] for s in states]):
        yield dict(zip(states, combo))


def md_moments(m, choice):
    """First moment and variance per state of a memoryless deterministic scheduler."""
    e = chain_solve(m, choice, lambda s, a: Fraction(a.weight))

    def second(s, a):
        return sum((p * (a.weight ** 2 + 2 * a.weight * e[t]) for t, p in a.successors), Fraction(0))

    q = chain_solve(m, choice, second)
    return e, {s: q[s] - e[s] ** 2 for s in m.states}


def brute_expectation(m, maximize=True):
    best = None
    pick = max if maximize else min
    for choice in md_schedulers(m):
        e = chain_solve(m, choice, lambda s, a: Fraction(a.weight))
        best = e if best is None else {s: pick(best[s], e[s]) for s in m.states}
    return best


def brute_min_variance(m, maximize=True):
    """Least variance per state over memoryless deterministic expectation-optimal schedulers."""
    opt = brute_expectation(m, maximize)
    best = None
    for choice in md_schedulers(m):
        e, v = md_moments(m, choice)
        if any(e[s] != opt[s] for s in m.states):
            continue
        best = v if best is None else {s: min(best[s], v[s]) for s in m.states}
    return best


def moments_of(dist):
    """Mean and variance of a finite distribution ``{value: prob}``."""
    mean = sum((p * x for x, p in dist.items()), Fraction(0))
    return mean, sum((p * (x - mean) ** 2 for x, p in dist.items()), Fraction(0))


def geo_tail_sums(start: int):
    """Sum over n >= start of 2^-(n+1), n 2^-(n+1) and n^2 2^-(n+1), exactly."""
    n = sympy.Symbol("n", integer=True, nonnegative=True)
    out = []
    for k in range(3):
        val = sympy.summation(n ** k * sympy.Rational(1, 2) ** (n + 1), (n, start, sympy.oo))
        num, den = sympy.fraction(sympy.nsimplify(val))
        out.append(Fraction(int(num), int(den)))
    return out


def geo_brute_vpe(lam, bound: int, sign: int = 1):
    """Best ``sign * E - lam * V`` on the geometric fixture over all choices at c below ``bound``.

    c is entered with weight n with probability 2^-(n+1); alpha adds one unit.
    At n >= bound the choice is beta.
    """
    mass, first, second = geo_tail_sums(bound)
    best = None
    for combo in itertools.product([1, 0], repeat=bound):
        m1 = first + sum(Fraction(n + a, 2 ** (n + 1)) for n, a in enumerate(combo))
        m2 = second + sum(Fraction((n + a) ** 2, 2 ** (n + 1)) for n, a in enumerate(combo))
        val = sign * m1 - lam * (m2 - m1 ** 2)
        if best is None or val > best[0]:
            best = (val, combo)
    return best


def path_weights(m):
    """All accumulated weights of goal-reaching paths in a deterministic-transition acyclic model."""
    found = set()

    def walk(s, w):
        if s == m.goal:
            found.add(w)
            return
        for a in m.actions[s]:
            (t, _), = a.successors
            walk(t, w + a.weight)

    walk(m.init, 0)
    return found
