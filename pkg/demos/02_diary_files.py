# %% [markdown]
# Reading, validating and writing usage diaries
#
# A study comes as two CSV files: one row per participant, day, daytime slot
# and platform in the diary, and one row per participant in the profile file.

# %%
import tempfile
from pathlib import Path

from streamfootprint.diary import (
    DIARY_COLUMNS, PROFILE_COLUMNS, DiaryError, parse_dataset, weekly_device_hours, write_dataset,
)
from streamfootprint.fixtures import synth_average_participant

workdir = Path(tempfile.mkdtemp())
write_dataset(synth_average_participant(), workdir / "diary.csv", workdir / "profiles.csv")
print((workdir / "diary.csv").read_text().splitlines()[:4])

# %%
ds = parse_dataset(workdir / "diary.csv", workdir / "profiles.csv")
print(len(ds.participants), "participant,", len(ds.entries), "entries")
print({d.value: h for d, h in weekly_device_hours(ds, "avg").items()})

# %% [markdown]
# Two programmes in the same slot adding up to more than six hours is
# suspicious but possible (several screens at once), so it is only a warning.
# Out-of-range values are errors, reported with their line numbers.

# %%
diary = workdir / "multi.csv"
profiles = workdir / "multi_profiles.csv"
diary.write_text(",".join(DIARY_COLUMNS) + "\n"
                 "p1,6,evening,paid_platform,4,smart_tv,2,\n"
                 "p1,6,evening,social_media,3.5,smartphone,1,waiting\n")
profiles.write_text(",".join(PROFILE_COLUMNS) + "\n"
                    "p1,27,female,tertiary,low,half_time,yes,unlimited,4,2,3,4,"
                    "automatic,r1080p,dont_know,\n")
print(parse_dataset(diary, profiles).warnings)

# %%
diary.write_text(",".join(DIARY_COLUMNS) + "\n"
                 "p1,6,evening,paid_platform,7,smart_tv,2,\n"
                 "p2,9,evening,free_platform,1,vcr,1,\n")
try:
    parse_dataset(diary, profiles)
except DiaryError as err:
    for message in err.errors:
        print(message)
