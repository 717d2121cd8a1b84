# %% [markdown]
# # Planning around overhauls
#
# The enclosing asset has scheduled overhauls. Upgrading at an overhaul is
# free of extra charge; upgrading at any other time adds a penalty. An
# infinite penalty allows upgrades only at overhauls.

# %%
from _paths import instance

from upgradeplan import solve, sweep_cd, sweep_overhaul_count

for name in ("setting_a_overhaul_only", "setting_b_overhaul_only", "setting_a_penalty", "setting_b_penalty"):
    inst = instance(name)
    r = solve(inst)
    times = ", ".join(f"{t:.4g}" for t in r.times) or "none"
    print(f"{name:26s} penalty {inst.penalty:>4}: upgrades at {times}; cost {r.total_cost:.4f}; off-overhaul {r.off_overhaul}")

# %% [markdown]
# ## How the penalty shapes the schedule
#
# For a fixed schedule the total cost is affine in the penalty, with slope
# equal to the number of off-overhaul upgrades. The optimum is the lower
# envelope of these lines, so the off-overhaul count can only fall as the
# penalty grows. The sweep finds the penalties where the optimum switches.

# %%
res = sweep_cd(instance("setting_b_penalty"), (0.0, 2.5), 26)
print("breakpoints:", ", ".join(f"{x:.5f}" for x in res.breakpoints))
last = None
for value, r in res.samples:
    if r.times != last:
        print(f"from penalty {value:.2f}: upgrades at {', '.join(f'{t:.4g}' for t in r.times)}, off-overhaul {r.off_overhaul}")
        last = r.times

# %% [markdown]
# ## More overhauls are not always better
#
# Evenly spaced overhauls with a penalty of 5: four overhauls line up with
# the unconstrained optimum, while five force a worse compromise.

# %%
res = sweep_overhaul_count(instance("setting_b_penalty5"), range(6))
for (m, r) in res.samples:
    print(f"m = {int(m)}: cost {r.total_cost:.4f}, upgrades at {', '.join(f'{t:.4g}' for t in r.times)}")
