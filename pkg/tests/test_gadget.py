import itertools
import random
from fractions import Fraction

import pytest
from helpers import path_weights, random_ec_free

from vpemdp.errors import EndComponentPresent, EpsOutOfRange, NegativeWeight
from vpemdp.gadget import build_gadget, f_bound
from vpemdp.mdp import build_mdp, parse_mdp, serialize_mdp
from vpemdp.schedulers import WeightBasedScheduler, point
from vpemdp.vpe import Verdict, maximize_vpe, threshold, unfold, vpe_of_scheduler

F = Fraction


def test_f_bound_examples():
    assert f_bound(2, 1, F(1, 2)) == 12
    assert f_bound(1, 0, 1) == 0
    assert f_bound(3, 2, F(1, 3)) == 90
    for eps in (0, F(3, 2), -1):
        with pytest.raises(EpsOutOfRange):
            f_bound(2, 1, eps)


def test_invariants_and_roundtrip(intro):
    g = build_gadget(intro, 3)
    m = g.mdp
    assert m.init not in intro.states and m.n == intro.n + 2
    assert g.lam == 18 * g.f_value and g.theta == 3 and g.target == 3
    assert g.eps == m.min_prob ** m.n
    assert g.f_value == f_bound(m.n, m.max_weight, g.eps)
    assert parse_mdp(serialize_mdp(m)) == m
    (start,) = m.actions[m.init]
    assert start.weight == 0 and dict(start.successors)[intro.init] == F(1, 2)


def test_target_zero_and_name_clash():
    m = build_mdp(["iota", "goal"], "iota", "goal", [("iota", "x", 1, {"goal": 1})])
    g = build_gadget(m, 0)
    fresh = [s for s in g.mdp.states if s not in m.states]
    assert len(fresh) == 2 and g.mdp.init in fresh
    (finish,) = [a for s in fresh if s != g.mdp.init for a in g.mdp.actions[s]]
    assert finish.weight == 0


def test_rejects_unsupported():
    loop = build_mdp(["x", "goal"], "x", "goal", [("x", "loop", 1, {"x": 1}), ("x", "exit", 0, {"goal": 1})])
    with pytest.raises(EndComponentPresent):
        build_gadget(loop, 1)
    with pytest.raises(NegativeWeight):
        build_gadget(build_mdp(["x", "goal"], "x", "goal", [("x", "a", -1, {"goal": 1})]), 1)


def test_sure_target_reaches_theta():
    chain = build_mdp(["a", "b", "goal"], "a", "goal", [("a", "x", 1, {"b": 1}), ("b", "y", 1, {"goal": 1})])
    g = build_gadget(chain, 2)
    rep = maximize_vpe(g.mdp, g.lam)
    assert rep.exact and rep.value == 2 and rep.moments.variance == 0


def test_spread_outcomes_stay_below():
    # outcomes are 1 or 3 under every scheduler, never 2 surely
    m = build_mdp(
        ["v", "w", "goal"], "v", "goal",
        [("v", "lo", 1, {"goal": F(1, 2), "w": F(1, 2)}), ("v", "hi", 3, {"goal": 1}),
         ("w", "up", 2, {"goal": 1}), ("w", "flat", 0, {"v": 1})],
    )
    g = build_gadget(m, 2)
    bound = 4
    pairs = unfold(g.mdp, bound).decision_pairs
    tail = maximize_vpe(g.mdp, g.lam, bound=1).scheduler.tail
    best = max(
        vpe_of_scheduler(g.mdp, g.lam, WeightBasedScheduler(bound, tail, {p: point(a) for p, a in zip(pairs, combo)})).value
        for combo in itertools.product(*[[a.name for a in g.mdp.actions[s]] for s, _ in pairs])
    )
    assert best < 2
    assert maximize_vpe(g.mdp, g.lam, bound=bound).value == best


def test_soundness_four_state_inputs():
    rng = random.Random(44)
    for _ in range(10):
        m = random_ec_free(rng, max_states=4, min_states=3, max_actions=2, max_weight=2, deterministic=True)
        weights = path_weights(m)
        for target in range(1, 6):
            g = build_gadget(m, target)
            assert (threshold(g.mdp, g.lam, g.theta).verdict is Verdict.HOLDS) == (target in weights)
