from fractions import Fraction

import pytest

from vpemdp.distribution import (
    FrequencyTable,
    MomentPair,
    TerminalDistribution,
    convex_combination,
    frequencies,
    mixture_moments,
    moments_from_distribution,
    scheduler_moments,
    terminal_distribution,
    to_weight_based,
)
from vpemdp.errors import EndComponentPresent, MissingTailValue, NegativeWeight, ParseError, ValidationError, ZeroVisitDivision
from vpemdp.mdp import build_mdp
from vpemdp.schedulers import MemorylessScheduler, WeightBasedScheduler, memoryless, parse_scheduler, point, serialize_scheduler

F = Fraction
GEO_TAIL = MemorylessScheduler.deterministic({"s_init": "tau", "s": "tau", "c": "beta"})
INTRO_TAIL = {"s_init": "alpha", "a": "tau", "b": "tau", "c": "tau", "d": "tau"}


def s2(bound):
    return WeightBasedScheduler(bound, GEO_TAIL, {("c", 0): point("alpha"), ("c", 1): point("alpha")})


def test_geo_s2_distribution(geo):
    d = terminal_distribution(geo, s2(4))
    assert d.goal_mass == {1: F(1, 2), 2: F(3, 8), 3: F(1, 16)}
    assert d.boundary_mass == {("s", 4): F(1, 32), ("c", 4): F(1, 32)}
    assert d.total == 1


def test_intro_gamma_bound_one(intro):
    sched = WeightBasedScheduler(1, MemorylessScheduler.deterministic(INTRO_TAIL), {("s_init", 0): point("gamma")})
    d = terminal_distribution(intro, sched)
    assert d.goal_mass == {} and d.boundary_mass == {("goal", 3): F(9, 10), ("c", 3): F(1, 10)}


def test_micro_sure_weight(micro):
    d = terminal_distribution(micro, memoryless({"u": "one"}, bound=3))
    assert d.goal_mass == {1: 1} and d.boundary_mass == {}


def test_moments_examples(geo, intro):
    e = {"s_init": 1, "s": 2, "c": 0, "goal": 0}
    q = {"s_init": 3, "s": 6, "c": 0, "goal": 0}
    for bound in (2, 3, 7):
        assert moments_from_distribution(terminal_distribution(geo, s2(bound)), e, q) == MomentPair(F(7, 4), F(19, 16))
    assert moments_from_distribution(TerminalDistribution(6, {5: F(1)}, {}), {}, {}) == MomentPair(5, 0)
    delta = WeightBasedScheduler(1, MemorylessScheduler.deterministic(INTRO_TAIL), {("s_init", 0): point("delta")})
    assert scheduler_moments(intro, delta) == MomentPair(4, 4)


def test_missing_tail():
    with pytest.raises(MissingTailValue):
        moments_from_distribution(TerminalDistribution(1, {}, {("x", 1): F(1)}), {}, {})


def test_geo_frequencies(geo):
    f = frequencies(geo, s2(6))
    for n in range(6):
        assert f.visits["c", n] == F(1, 2 ** (n + 1)) and f.visits["s", n] == F(1, 2 ** (n + 1))
    for (s, w), v in f.visits.items():
        if s != geo.goal:
            assert sum(x for (t, u, _), x in f.action_visits.items() if (t, u) == (s, w)) == v


def test_intro_beta_frequencies(intro):
    sched = WeightBasedScheduler(5, MemorylessScheduler.deterministic(INTRO_TAIL), {("s_init", 0): point("beta")})
    f = frequencies(intro, sched)
    assert [f.visits["b", k] for k in range(5)] == [F(1, 3 ** k) for k in range(5)]
    assert frequencies(intro, sched).visits["s_init", 0] == 1


def test_to_weight_based_fixed_point(geo):
    sched = s2(4)
    back = to_weight_based(frequencies(geo, sched), GEO_TAIL)
    assert frequencies(geo, back) == frequencies(geo, sched)
    assert all(back.dist(s, w) == sched.dist(s, w) for (s, w) in back.table)


def test_zero_visit_division():
    freq = FrequencyTable(2, {("x", 0): F(0)}, {("x", 0, "a"): F(1, 2)})
    with pytest.raises(ZeroVisitDivision):
        to_weight_based(freq, MemorylessScheduler({}))


def test_convex_alpha_delta(intro):
    tail = MemorylessScheduler.deterministic(INTRO_TAIL)
    a = WeightBasedScheduler(1, tail, {("s_init", 0): point("alpha")})
    d = WeightBasedScheduler(1, tail, {("s_init", 0): point("delta")})
    r = convex_combination(intro, a, d, F(1, 2))
    assert r.table[("s_init", 0)] == {"alpha": F(1, 2), "delta": F(1, 2)}
    assert scheduler_moments(intro, r) == MomentPair(2, 6)


def test_convex_same_scheduler(geo):
    r = convex_combination(geo, s2(4), s2(4), F(1, 3))
    assert frequencies(geo, r) == frequencies(geo, s2(4))


def test_convex_requires_shared_tail(geo):
    other = MemorylessScheduler.deterministic({"s_init": "tau", "s": "tau", "c": "alpha"})
    with pytest.raises(ValueError):
        convex_combination(geo, s2(4), WeightBasedScheduler(4, other), F(1, 2))
    with pytest.raises(ValueError):
        convex_combination(geo, s2(4), s2(4), 1)


def test_mixture_examples():
    assert mixture_moments(MomentPair(0, 0), MomentPair(4, 4), F(1, 2)) == MomentPair(2, 6)
    assert mixture_moments(MomentPair(1, 1), MomentPair(7, 3), 0) == MomentPair(7, 3)
    mid = mixture_moments(MomentPair(F(3, 2), F(3, 4)), MomentPair(F(10, 3), F(10, 9)), F(1, 2))
    x = mid.expectation
    assert x == F(29, 12)
    assert mid.variance == F(3, 4) + (x - F(3, 2)) * F(13, 66) + (x - F(3, 2)) * (F(10, 3) - x)


def test_zero_weight_level_cycle():
    # randomized scheduler cycling between x and y at weight 0
    m = build_mdp(
        ["x", "y", "goal"], "x", "goal",
        [("x", "hop", 0, {"y": 1}), ("x", "out", 2, {"goal": 1}), ("y", "back", 0, {"x": F(1, 2), "goal": F(1, 2)})],
    )
    tail = MemorylessScheduler.deterministic({"x": "out", "y": "back"})
    sched = WeightBasedScheduler(3, tail, {("x", 0): {"hop": F(1, 2), "out": F(1, 2)}})
    d = terminal_distribution(m, sched)
    # visits v_x = 1 + v_y / 2, v_y = v_x / 2  ->  v_x = 4/3
    assert d.goal_mass == {0: F(1, 3), 2: F(2, 3)} and d.total == 1


def test_unsupported_models():
    loop = build_mdp(["x", "goal"], "x", "goal", [("x", "loop", 1, {"x": 1}), ("x", "exit", 0, {"goal": 1})])
    with pytest.raises(EndComponentPresent):
        terminal_distribution(loop, memoryless({"x": "exit"}))
    neg = build_mdp(["x", "goal"], "x", "goal", [("x", "a", -1, {"goal": 1})])
    with pytest.raises(NegativeWeight):
        terminal_distribution(neg, memoryless({"x": "a"}))


def test_scheduler_text_roundtrip(geo):
    text = "bound 8\nat c 0 choose alpha\nat c 5 choose beta 1/2 alpha 1/2\ntail c choose beta\n"
    sched = parse_scheduler(text, geo)
    assert sched.dist("c", 5) == {"beta": F(1, 2), "alpha": F(1, 2)}
    assert sched.dist("c", 3) == point("beta") and sched.dist("c", 9) == point("beta")
    assert parse_scheduler(serialize_scheduler(sched, geo), geo) == sched


@pytest.mark.parametrize(
    "text,error",
    [
        ("at c 0 choose alpha\ntail c choose beta\n", ParseError),
        ("bound 2\nat c 0 choose gamma\ntail c choose beta\n", ValidationError),
        ("bound 2\nat c 2 choose alpha\ntail c choose beta\n", ValidationError),
        ("bound 2\nat c 0 choose alpha 1/2 beta 1/3\ntail c choose beta\n", ValidationError),
        ("bound 2\n", ValidationError),
        ("bound 2\nwhatever\n", ParseError),
    ],
)
def test_scheduler_text_errors(geo, text, error):
    with pytest.raises(error):
        parse_scheduler(text, geo)
