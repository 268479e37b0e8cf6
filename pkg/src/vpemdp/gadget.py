"""Reduction from exact-weight reachability to the VPE threshold problem.

Given ``m`` and a target ``T``, a fresh initial state ``iota`` flips a fair
coin between the old initial state and a fresh state ``iota'`` that moves to
goal with weight ``T``. With ``lam = 18 f(n, W, eps)`` and threshold ``T``,
the optimal VPE of the new model reaches ``T`` exactly when some scheduler of
``m`` accumulates weight ``T`` almost surely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .distribution import check_supported
from .errors import EpsOutOfRange, ValidationError
from .mdp import Action, Mdp


@dataclass(frozen=True)
class GadgetInstance:
    mdp: Mdp
    lam: Fraction
    theta: Fraction
    target: int
    f_value: Fraction
    eps: Fraction


def f_bound(n: int, W: int, eps) -> Fraction:
    """Upper bound ``n W (n/eps + (1-eps)/eps**2)`` on the expected accumulated weight."""
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise EpsOutOfRange(f"eps must lie in (0, 1], got {eps}")
    if n < 1 or W < 0:
        raise ValueError("need n >= 1 and W >= 0")
    return n * W * (n / eps + (1 - eps) / eps ** 2)


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def build_gadget(m: Mdp, target: int) -> GadgetInstance:
    """Construct the reduction instance; ``eps`` is ``p_min ** n`` of the new model."""
    if target < 0:
        raise ValidationError("target must be a natural number")
    check_supported(m)
    taken = set(m.states)
    iota = _fresh("iota", taken)
    iota2 = _fresh("iota_prime", taken)
    acts = dict(m.actions)
    acts[iota] = (Action("start", 0, ((m.init, Fraction(1, 2)), (iota2, Fraction(1, 2)))),)
    acts[iota2] = (Action("finish", target, ((m.goal, Fraction(1)),)),)
    g = Mdp((iota, *m.states, iota2), iota, m.goal, acts)
    eps = g.min_prob ** g.n
    f = f_bound(g.n, g.max_weight, eps)
    if f == 0:
        raise ValidationError("all weights and the target are 0; the instance is trivially positive")
    return GadgetInstance(g, 18 * f, Fraction(target), target, f, eps)
