# %% [markdown]
# Checking exact moments against sampling
#
# The simulator is seeded and splits work into fixed-size chunks, so the same
# seed gives the same histogram regardless of the number of worker processes.

# %%
import math

import numpy as np

from vpemdp import WeightBasedScheduler, load_fixture, scheduler_moments, simulate
from vpemdp.schedulers import MemorylessScheduler, point

m = load_fixture("intro")
tail = MemorylessScheduler.deterministic({"s_init": "alpha", "a": "tau", "b": "tau", "c": "tau", "d": "tau"})
gamma = WeightBasedScheduler(1, tail, {("s_init", 0): point("gamma")})

exact = scheduler_moments(m, gamma)
run = simulate(m, gamma, 100_000, seed=2024)
se = math.sqrt(exact.variance) / math.sqrt(run.samples)
print(f"exact mean {exact.expectation} ~ {float(exact.expectation):.4f}")
print(f"sampled    {float(run.mean):.4f}  ({float(run.mean - exact.expectation) / se:+.2f} standard errors)")
print(f"variance   exact {float(exact.variance):.4f}, sampled {float(run.variance):.4f}")

# %% [markdown]
# The weight is 3 times a geometric number of steps with success
# probability 9/10.

# %%
weights = np.array(sorted(run.histogram))
counts = np.array([run.histogram[w] for w in weights])
steps = weights // 3
expected = run.samples * 0.9 * 0.1 ** (steps - 1)
for w, c, e in zip(weights[:4], counts[:4], expected[:4]):
    print(f"weight {w:2d}: observed {c:6d}, expected {e:9.1f}")
