import math
from fractions import Fraction

import pytest

from vpemdp.errors import StepLimitExceeded
from vpemdp.mdp import build_mdp
from vpemdp.schedulers import MemorylessScheduler, WeightBasedScheduler, memoryless, point
from vpemdp.simulate import GENERATOR, simulate

F = Fraction


def test_micro_is_exact(micro):
    s = simulate(micro, memoryless({"u": "one"}), 500, seed=1)
    assert s.mean == 1 and s.variance == 0 and s.histogram == {1: 500}


def test_geo_s2_mean_and_variance(geo):
    tail = MemorylessScheduler.deterministic({"s_init": "tau", "s": "tau", "c": "beta"})
    s2 = WeightBasedScheduler(2, tail, {("c", 0): point("alpha"), ("c", 1): point("alpha")})
    n = 40000
    s = simulate(geo, s2, n, seed=99)
    assert abs(float(s.mean) - 7 / 4) < 5 * math.sqrt(19 / 16) / math.sqrt(n)
    assert abs(float(s.variance) - 19 / 16) < 0.1


def test_independent_of_job_count(intro):
    sched = memoryless({"s_init": "beta", "a": "tau", "b": "tau", "c": "tau", "d": "tau"})
    one = simulate(intro, sched, 10000, seed=5)
    three = simulate(intro, sched, 10000, seed=5, jobs=3)
    assert one == three
    assert simulate(intro, sched, 10000, seed=6) != one


def test_histogram_csv(micro):
    s = simulate(micro, memoryless({"u": "zero"}), 3, seed=0)
    assert s.histogram_csv() == "weight,count\n0,3\n"
    assert s.generator == GENERATOR


def test_step_cap():
    m = build_mdp(["x", "goal"], "x", "goal", [("x", "a", 1, {"x": F(999, 1000), "goal": F(1, 1000)})])
    with pytest.raises(StepLimitExceeded):
        simulate(m, memoryless({"x": "a"}), 5, seed=3, step_cap=10)


def test_argument_checks(micro):
    with pytest.raises(ValueError):
        simulate(micro, memoryless({"u": "one"}), 0, seed=1)
    with pytest.raises(ValueError):
        simulate(micro, memoryless({"u": "one"}), 1, seed=2 ** 64)
