# %% [markdown]
# What-if scenarios
#
# A scenario bundles parameter overrides with behavior changes: swapping
# devices, forcing or defaulting a resolution, scaling hours per platform.

# %%
from streamfootprint import default_params, synth_average_participant
from streamfootprint.diary import PlatformCategory
from streamfootprint.params import Resolution
from streamfootprint.scenarios import ScenarioSpec, builtin_scenarios, compare_scenario, merge_scenarios

params = default_params()
week = synth_average_participant()


def report(spec):
    cmp = compare_scenario(spec, params, week)
    before, after = cmp.baseline["avg"].total_kg, cmp.scenario["avg"].total_kg
    line = f"{spec.name:<28}{before:.3f} -> {after:.3f} kg ({after / before - 1:+.0%})"
    if cmp.substitution_intensity_ratio:
        line += f", per-hour factor {cmp.substitution_intensity_ratio:.1f}"
    print(line)


for spec in builtin_scenarios().values():
    report(spec)

# %% [markdown]
# Custom levers: a greener device grid, and always streaming paid platforms
# in 1080p.

# %%
green = ScenarioSpec("green device grid", param_overrides={"grid_device.kg_per_kwh": 0.1})
hd = ScenarioSpec("paid in 1080p", forced_resolution={PlatformCategory.PAID_PLATFORM: Resolution.R1080P})
for spec in (green, hd, merge_scenarios(green, hd, name="both")):
    report(spec)
