# %% [markdown]
# Four ways to reach goal
#
# The bundled `intro` model offers four actions at the start. Each one leads
# to a loop that pays a fixed weight per step until a coin sends it to goal.
# Higher expectation comes with higher spread, and the penalty factor lambda
# decides which choice wins.

# %%
from fractions import Fraction

import numpy as np

from vpemdp import WeightBasedScheduler, frontier, load_fixture, maximize_vpe, mixture_moments, scheduler_moments
from vpemdp.schedulers import MemorylessScheduler, point

m = load_fixture("intro")
tail = MemorylessScheduler.deterministic({"s_init": "alpha", "a": "tau", "b": "tau", "c": "tau", "d": "tau"})

pure = {}
for a in ("alpha", "beta", "gamma", "delta"):
    pure[a] = scheduler_moments(m, WeightBasedScheduler(1, tail, {("s_init", 0): point(a)}))
    print(f"{a:>6}: E = {pure[a].expectation}, V = {pure[a].variance}")

# %% [markdown]
# Optimal choice for a few penalty factors. At lambda = 1 the answer is 20/9.

# %%
for lam in (Fraction(1, 10), Fraction(1), Fraction(4)):
    rep = maximize_vpe(m, lam)
    (choice,) = rep.scheduler.table[("s_init", 0)]
    print(f"lambda = {lam}: choose {choice}, VPE = {rep.value}, exact = {rep.exact}")

# %% [markdown]
# Switching point between delta and gamma: VPE(delta) = 4 - 4 lambda and
# VPE(gamma) = 10/3 - 10/9 lambda meet at lambda = 3/13.

# %%
lam = Fraction(3, 13)
print(pure["delta"].vpe(lam), pure["gamma"].vpe(lam))

# %% [markdown]
# Randomizing between two pure choices traces a parabola in the
# (expectation, variance) plane whose x^2 coefficient is -1, so mixing never
# helps the VPE.

# %%
ps = np.linspace(0, 1, 11)
arc = [mixture_moments(pure["alpha"], pure["delta"], Fraction(p).limit_denominator(100)) for p in ps]
for q in arc[::2]:
    print(f"E = {float(q.expectation):5.2f}  V = {float(q.variance):5.2f}  VPE(1) = {float(q.vpe(1)):6.2f}")

# %%
rows = frontier(m, [Fraction(1, 100), Fraction(1, 4), Fraction(1), Fraction(4)])
for r in rows:
    print(r.lam, r.expectation, r.variance, r.vpe)
