"""Maximal end components and their classification by mean payoff."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import networkx as nx

from .mdp import Action, Mdp
from .numeric import solve


@dataclass(frozen=True)
class EndComponent:
    states: frozenset
    actions: Mapping[str, tuple[str, ...]]

    def retained(self, m: Mdp, s: str) -> list[Action]:
        return [m.action(s, a) for a in self.actions[s]]


class EcKind(enum.Enum):
    ZERO_EC = "ZeroEc"
    NEGATIVE = "NegativeMeanPayoff"
    NON_NEGATIVE = "NonNegativeMeanPayoff"


@dataclass(frozen=True)
class EcClass:
    kind: EcKind
    max_mean_payoff: Fraction


def find_end_components(m: Mdp) -> list[EndComponent]:
    """Return the maximal end components of ``m``.

    Standard refinement: split the current sub-MDP into SCCs, drop actions
    that can leave their SCC, drop states left without actions, repeat.
    Components are ordered by their first state in declaration order.
    """
    acts = {s: [a for a in m.actions[s]] for s in m.nongoal}
    alive = set(acts)
    while True:
        g = nx.DiGraph()
        g.add_nodes_from(alive)
        for s in alive:
            for a in acts[s]:
                g.add_edges_from((s, t) for t, _ in a.successors)
        comp_of = {}
        for i, comp in enumerate(nx.strongly_connected_components(g)):
            for s in comp:
                comp_of[s] = i
        changed = False
        for s in list(alive):
            keep = [
                a for a in acts[s]
                if all(t in alive and comp_of[t] == comp_of[s] for t, _ in a.successors)
            ]
            if len(keep) != len(acts[s]):
                changed = True
                acts[s] = keep
            if not keep:
                alive.discard(s)
                changed = True
        if not changed:
            break
    groups: dict[int, list[str]] = {}
    for s in m.states:
        if s in alive:
            groups.setdefault(comp_of[s], []).append(s)
    result = []
    for members in groups.values():
        result.append(EndComponent(
            frozenset(members),
            {s: tuple(a.name for a in acts[s]) for s in members},
        ))
    result.sort(key=lambda ec: min(m.index[s] for s in ec.states))
    return result


def _ordered(m: Mdp, states) -> list[str]:
    return sorted(states, key=m.index.__getitem__)


def is_zero_ec(m: Mdp, ec: EndComponent) -> bool:
    """True iff every cycle inside ``ec`` has weight 0.

    A component is strongly connected, so this holds exactly when there is a
    potential with ``wgt(s,a) + phi(t) - phi(s) == 0`` on every edge.
    """
    order = _ordered(m, ec.states)
    phi = {order[0]: 0}
    todo = [order[0]]
    while todo:
        s = todo.pop()
        for a in ec.retained(m, s):
            for t, _ in a.successors:
                if t not in phi:
                    phi[t] = phi[s] - a.weight
                    todo.append(t)
    return all(
        a.weight + phi[t] - phi[s] == 0
        for s in order for a in ec.retained(m, s) for t, _ in a.successors
    )


def _evaluate_gain_bias(states, policy, reward):
    """Multichain evaluation of a fixed policy on a closed state set."""
    g = nx.DiGraph()
    g.add_nodes_from(states)
    for s in states:
        g.add_edges_from((s, t) for t, _ in policy[s].successors)
    cond = nx.condensation(g)
    recurrent = [set(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]
    rec_of = {s: i for i, r in enumerate(recurrent) for s in r}
    gain, bias = {}, {}
    for r in recurrent:
        rs = [s for s in states if s in r]
        idx = {s: i for i, s in enumerate(rs)}
        k = len(rs)
        # stationary distribution: pi (I - P) = 0, last equation replaced by sum(pi) = 1
        a = [[Fraction(0)] * k for _ in range(k)]
        for j, t in enumerate(rs):
            a[j][j] += 1
            for s in rs:
                a[j][idx[s]] -= policy[s].prob(t)
        a[-1] = [Fraction(1)] * k
        b = [Fraction(0)] * k
        b[-1] = Fraction(1)
        pi = solve(a, b)
        gr = sum((pi[idx[s]] * reward(s, policy[s]) for s in rs), Fraction(0))
        # bias inside the class: (I - P) h = r - g with pi . h = 0
        a = [[Fraction(0)] * k for _ in range(k)]
        b = [Fraction(0)] * k
        for i, s in enumerate(rs):
            a[i][i] += 1
            for t, p in policy[s].successors:
                a[i][idx[t]] -= p
            b[i] = reward(s, policy[s]) - gr
        a[-1] = list(pi)
        b[-1] = Fraction(0)
        h = solve(a, b)
        for s in rs:
            gain[s] = gr
            bias[s] = h[idx[s]]
    trans = [s for s in states if s not in rec_of]
    if trans:
        idx = {s: i for i, s in enumerate(trans)}
        k = len(trans)
        a = [[Fraction(0)] * k for _ in range(k)]
        b = [Fraction(0)] * k
        for i, s in enumerate(trans):
            a[i][i] += 1
            for t, p in policy[s].successors:
                if t in idx:
                    a[i][idx[t]] -= p
                else:
                    b[i] += p * gain[t]
        gt = solve(a, b)
        for s in trans:
            gain[s] = gt[idx[s]]
        a = [[Fraction(0)] * k for _ in range(k)]
        b = [Fraction(0)] * k
        for i, s in enumerate(trans):
            a[i][i] += 1
            b[i] = reward(s, policy[s]) - gain[s]
            for t, p in policy[s].successors:
                if t in idx:
                    a[i][idx[t]] -= p
                else:
                    b[i] += p * bias[t]
        ht = solve(a, b)
        for s in trans:
            bias[s] = ht[idx[s]]
    return gain, bias


def max_mean_payoff(m: Mdp, ec: EndComponent, sign: int = 1) -> Fraction:
    """Maximal expected mean payoff inside ``ec`` (weights scaled by ``sign``).

    Howard's multichain policy iteration with exact gain/bias solves.
    """
    states = _ordered(m, ec.states)
    acts = {s: ec.retained(m, s) for s in states}

    def reward(s, a):
        return Fraction(sign * a.weight)

    policy = {s: acts[s][0] for s in states}
    while True:
        gain, bias = _evaluate_gain_bias(states, policy, reward)
        changed = False
        for s in states:
            cur = policy[s]
            gvals = [sum((p * gain[t] for t, p in a.successors), Fraction(0)) for a in acts[s]]
            best = max(gvals)
            if best > gain[s]:
                policy[s] = acts[s][gvals.index(best)]
                changed = True
                continue
            cands = [a for a, gv in zip(acts[s], gvals) if gv == best]
            hvals = [reward(s, a) + sum((p * bias[t] for t, p in a.successors), Fraction(0)) for a in cands]
            cur_h = reward(s, cur) + sum((p * bias[t] for t, p in cur.successors), Fraction(0))
            hbest = max(hvals)
            if hbest > cur_h:
                policy[s] = cands[hvals.index(hbest)]
                changed = True
        if not changed:
            return max(gain.values())


def classify_ec(m: Mdp, ec: EndComponent, sign: int = 1) -> EcClass:
    """Classify ``ec`` as a 0-EC or by the sign of its maximal mean payoff.

    ``sign=-1`` classifies with all weights negated, which is what the
    minimizing direction needs.
    """
    if is_zero_ec(m, ec):
        return EcClass(EcKind.ZERO_EC, Fraction(0))
    mp = max_mean_payoff(m, ec, sign)
    kind = EcKind.NEGATIVE if mp < 0 else EcKind.NON_NEGATIVE
    return EcClass(kind, mp)
