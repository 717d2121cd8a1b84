# %% [markdown]
# # Upgrade price, grid oracle and a short-horizon surprise

# %%
import numpy as np
from _paths import instance

from upgradeplan import Policy, oracle_solve, policy_cost, solve, sweep_c0
from upgradeplan.oracle import GridSpec

inst = instance("setting_b_penalty5")

# %% [markdown]
# ## Price sweep
#
# Each schedule's cost is affine in the price with slope equal to its
# number of upgrades, so the number of upgrades never increases with price.

# %%
res = sweep_c0(inst, (0.3, 200.0), 41)
print("price breakpoints:", ", ".join(f"{x:.4f}" for x in res.breakpoints))
for value, r in res.samples[::8]:
    print(f"price {value:7.2f}: N = {r.n_upgrades}, cost {r.total_cost:.4f}")

# %% [markdown]
# Near a price of 0.2926 three schedules (5, 4 and 2 upgrades) tie at a
# single price, so the optimum jumps from 5 to 2 upgrades directly.

# %%
price = sweep_c0(inst, (0.25, 0.35), 21).breakpoints[0]
for times in ((5.0, 10.0, 15.0, 20.0, 25.0), (5.0, 10.0, 20.0, 25.0), (10.0, 20.0)):
    cost = policy_cost(inst.model, Policy(times, inst.horizon), price, inst.penalty, inst.overhauls)
    print(f"price {price:.7f}, upgrades at {times}: {cost:.6f}")

# %% [markdown]
# ## Oracle convergence
#
# The grid oracle restricts upgrades to grid points, so its cost is never
# below the exact optimum and the gap shrinks with the step. Setting B
# without overhauls upgrades every 6 years; these grids miss those ages.

# %%
base = instance("setting_b")
exact = solve(base).total_cost
for cells in (71, 142, 284, 568):
    o = oracle_solve(base, GridSpec(base.horizon / cells))
    print(f"{cells:4d} cells: gap {o.total_cost - exact:.2e}")

# %% [markdown]
# ## A pointwise cheaper cycle cost can need more upgrades
#
# Over half a year the first cost curve lies above the second everywhere,
# yet the first is best left alone while the second is upgraded twice.

# %%
a, b = instance("short_horizon_a"), instance("short_horizon_b")
t = np.linspace(0.0, 0.5, 6)
print("age        ", " ".join(f"{x:7.2f}" for x in t))
print("cost first ", " ".join(f"{x:7.4f}" for x in a.cost(t)))
print("cost second", " ".join(f"{x:7.4f}" for x in b.cost(t)))
for name, i in (("first", a), ("second", b)):
    r = solve(i)
    print(f"{name}: N = {r.n_upgrades}, cost {r.total_cost:.4f}")
