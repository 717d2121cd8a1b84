# %% [markdown]
# # Upgrade schedules without overhauls
#
# A system is upgraded at chosen ages over a fixed horizon. Each upgrade
# costs a fixed price and restarts the running-cost clock. This walkthrough
# shows how the shape of the cycle cost decides which solver runs.

# %%
from _paths import instance

from upgradeplan import classify_shape, equidistant_cost, oracle_solve, solve_base, tail_cost
from upgradeplan.oracle import GridSpec

a, b = instance("setting_a"), instance("setting_b")

# %% [markdown]
# Both settings have convex cycle costs, so the best schedule with N
# upgrades spaces them evenly. The total cost is convex in N, which lets
# the solver stop at the first N that does not improve.

# %%
print(" N   evenly spaced cost A   evenly spaced cost B")
for n in range(6):
    print(f"{n:2d}   {equidistant_cost(a, a.price, n):20.4f}   {equidistant_cost(b, b.price, n):20.4f}")
for name, inst in (("A", a), ("B", b)):
    r = solve_base(inst)
    print(f"setting {name}: {classify_shape(inst.model, inst.horizon)}, upgrade at {r.times}, cost {r.total_cost:.4f}")

# %% [markdown]
# ## An S-shaped cycle cost
#
# Here the cycle cost is convex up to an inflection age and concave after
# it. Evenly spaced upgrades are no longer optimal: the last cycle may be
# longer than the others.

# %%
unequal = instance("unequal_final_cycle")
shape = classify_shape(unequal.model, unequal.horizon)
r = solve_base(unequal)
print(shape)
print(f"optimum: upgrade at {r.times}, cost {r.total_cost:.6f}")
for c in sorted(r.candidates, key=lambda c: c.cost):
    print(f"  candidate with {c.n_upgrades} upgrade(s) at {c.times}: {c.cost:.6f}")
print(f"one upgrade at age 5.0: {tail_cost(unequal, unequal.price, 1, 5.0):.6f}")

# %% [markdown]
# The grid oracle is a brute-force dynamic program over a fixed grid of
# upgrade ages. It never beats the exact solver, and on a grid containing
# 4.9 it matches it.

# %%
o = oracle_solve(unequal, GridSpec(0.1))
print(f"grid optimum: {o.times}, cost {o.total_cost:.6f}")

# %% [markdown]
# ## A logistic cycle cost
#
# With a cheap upgrade, many short cycles beat one long cycle even though
# the cost curve is S-shaped.

# %%
logistic = instance("logistic")
r = solve_base(logistic)
print(classify_shape(logistic.model, logistic.horizon))
print(f"{r.n_upgrades} upgrades, cost {r.total_cost:.5f}; never upgrading costs {logistic.cost(logistic.horizon):.2e}")
