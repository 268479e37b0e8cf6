# %% [markdown]
# Why memory of the accumulated weight matters
#
# In the `geo` model, state c is reached with accumulated weight n with
# probability 2^-(n+1). There, alpha adds one more unit and beta adds none.
# The scheduler S_k picks alpha only while the weight is below k.

# %%
from fractions import Fraction

from vpemdp import WeightBasedScheduler, load_fixture, maximize_vpe, saturation_point, vpe_of_scheduler
from vpemdp.schedulers import MemorylessScheduler, point

m = load_fixture("geo")
tail = MemorylessScheduler.deterministic({"s_init": "tau", "s": "tau", "c": "beta"})


def s_k(k):
    return WeightBasedScheduler(k, tail, {("c", w): point("alpha") for w in range(k)})


for k in range(7):
    rep = vpe_of_scheduler(m, 1, s_k(k))
    print(f"S_{k}: E = {rep.moments.expectation}, V = {rep.moments.variance}, VPE = {rep.value}")

# %% [markdown]
# No memoryless scheduler does as well as S_2 (VPE 9/16): always-alpha gives
# -1 and always-beta gives 0.

# %% [markdown]
# The saturation point guarantees that beyond weight K an optimal scheduler
# only minimizes expectation. For this small model K is already 8207, so a
# full search is out of reach. A smaller bound still yields a certified lower
# bound.

# %%
c = saturation_point(m, 1)
print(f"n={c.n} W={c.W} eps={c.eps} delta={c.delta} U1={c.U1} U2={c.U2} K={c.K}")

for bound in (2, 4, 8):
    rep = maximize_vpe(m, 1, bound=bound)
    alpha_at = [w for (s, w), d in sorted(rep.scheduler.table.items()) if d == point("alpha")]
    print(f"bound {bound}: VPE >= {rep.value} (alpha at weights {alpha_at}), exact = {rep.exact}")

# %% [markdown]
# With a smaller penalty factor the optimal scheduler takes alpha at more weights.

# %%
for lam in (Fraction(1, 2), Fraction(1, 4)):
    rep = maximize_vpe(m, lam, bound=8)
    alpha_at = [w for (s, w), d in sorted(rep.scheduler.table.items()) if d == point("alpha")]
    print(f"lambda = {lam}: alpha at {alpha_at}, VPE >= {rep.value}")
