# %% [markdown]
# From exact-weight reachability to a VPE threshold
#
# Given a model and a target T, the gadget adds a fresh start state that
# flips a fair coin. One side runs the original model. The other side
# collects exactly T. With a huge penalty factor, the VPE reaches T only if
# some scheduler of the original model lands on weight T surely.

# %%
from vpemdp import build_gadget, build_mdp, serialize_mdp, threshold

m = build_mdp(
    ["a", "b", "goal"], "a", "goal",
    [("a", "x", 1, {"b": 1}), ("a", "y", 2, {"goal": 1}), ("b", "z", 1, {"goal": 1}), ("b", "w", 3, {"goal": 1})],
)
# reachable totals: 1+1, 1+3 and 2
print(serialize_mdp(build_gadget(m, 2).mdp))

# %%
for target in range(1, 6):
    g = build_gadget(m, target)
    res = threshold(g.mdp, g.lam, g.theta)
    print(f"T = {target}: lambda = {g.lam}, verdict {res.verdict.value}, best VPE {res.value}")
