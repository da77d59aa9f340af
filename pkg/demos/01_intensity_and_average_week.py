# %% [markdown]
# Per-hour intensities and the footprint of an average streaming week
#
# The model charges three things to every hour of streaming: a share of the
# device's embodied emissions, the electricity the device draws, and the
# electricity spent moving the video through the network.

# %%
from streamfootprint import default_params, footprint, intensity_table, synth_average_participant
from streamfootprint.engine import annual_budget_share, annualize

params = default_params()
print(f"network intensity: {params.network.total()} kWh/GB")
print(f"grids: device {params.grid_device.kg_per_kwh} / network {params.grid_network.kg_per_kwh} kg/kWh")

# %%
print(f"{'device':<12}{'production':>12}{'electricity':>13}{'traffic':>10}{'total':>9}")
for row in intensity_table(params):
    print(f"{row.device.value:<12}{row.production_kg_per_h:>12.4f}{row.electricity_kg_per_h:>13.4f}"
          f"{row.traffic_kg_per_h:>10.4f}{row.total_kg_per_h:>9.4f}")

# %% [markdown]
# The built-in fixture spreads the sample-mean weekly hours per device over
# the four streaming platforms.

# %%
week = synth_average_participant()
fp = footprint(params, week, "avg")
for device, c in fp.by_device.items():
    print(f"{device.value:<12}{c.hours:6.2f} h  {c.total_kg:.3f} kg")
for platform, c in fp.by_platform.items():
    share = c.traffic_kg / c.total_kg
    print(f"{platform.value:<18}{c.total_kg:.3f} kg  (traffic {share:.0%})")

# %%
weekly = fp.total_kg
print(f"weekly {weekly:.2f} kg, yearly {annualize(weekly):.0f} kg, "
      f"{annual_budget_share(weekly):.1%} of a 1609 kg annual budget")

# %% [markdown]
# The hour-by-hour cells also support day and daytime views.

# %%
for slot, c in fp.by_slot.items():
    print(f"{slot.value:<10}{c.total_kg:.3f} kg")
