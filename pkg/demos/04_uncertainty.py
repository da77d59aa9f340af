# %% [markdown]
# Sensitivity and uncertainty
#
# One-at-a-time ranges show which inputs move the weekly total most; a seeded
# Monte Carlo run propagates all ranges at once. The ranges are placeholders,
# not measured uncertainties.

# %%
from streamfootprint import default_params, synth_average_participant
from streamfootprint.scenarios import Distribution, McConfig, default_mc_config, default_ranges, monte_carlo, tornado

params = default_params()
week = synth_average_participant()

rep = tornado(params, week, "avg", default_ranges(params))
print(f"baseline {rep.baseline_total:.3f} kg/week")
for row in rep.rows[:8]:
    print(f"{row.parameter:<36}{row.low_total:7.3f} .. {row.high_total:7.3f}  swing {row.swing:.3f}")

# %%
summary = monte_carlo(params, week, "avg", default_mc_config(params, seed=1, n_samples=20000))
print(f"mean {summary.mean:.3f}, sd {summary.sd:.3f}, 90 % interval {summary.p5:.3f} .. {summary.p95:.3f}")

# %% [markdown]
# A triangular prior on the smart TV's embodied emissions, alone.

# %%
cfg = McConfig(seed=7, n_samples=20000,
               distributions={"devices.smart_tv.embodied_kg": Distribution("triangular", 600, 1300, 1000)})
s = monte_carlo(params, week, "avg", cfg)
print(f"mean {s.mean:.3f}, median {s.p50:.3f}, p5..p95 {s.p5:.3f} .. {s.p95:.3f}")

# %% [markdown]
# Same seed, same numbers.

# %%
assert monte_carlo(params, week, "avg", cfg) == s
