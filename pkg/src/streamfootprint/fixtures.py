"""Built-in one-participant diary reproducing the sample-average week.

Only cohort averages are published, so the "average participant" is a
constructed diary. Its weekly hours per device are the sample means

    laptop_pc 4.92 h, smartphone 3.76 h, smart_tv 2.49 h, tablet 0.97 h

(12.14 h in total). The split of those hours across platforms is an
artifact choice, tuned to the per-platform narration of the published
footprint figures (paid platforms used most and dominated by the smart TV,
social media watched almost only on the smartphone, TV-station streams on the
laptop and tablet). Weekly hours per platform and device:

    platform            laptop_pc  smartphone  smart_tv  tablet   total
    paid_platform          2.10       0.50       1.74     0.43    4.77
    free_platform          1.46       1.18       0.45     0.09    3.18
    social_media           0.15       2.08        -        -      2.23
    tv_station_stream      1.21        -         0.30     0.45    1.96
    device total           4.92       3.76       2.49     0.97   12.14

Each platform uses one main device per day. Every platform is watched at the
device's automatic (native) resolution. One broadcast TV row is included to
exercise the exclusion rule; it carries no footprint.
"""

from __future__ import annotations

from .diary import DaytimeSlot as S, DiaryDataset, DiaryEntry, ParticipantProfile
from .diary import PlatformCategory as P, check_dataset
from .params import DeviceKind as D

AVERAGE_PARTICIPANT = "avg"

# (day, slot, platform, hours, device, audience)
_WEEK = [
    # paid platforms
    (1, S.EVENING, P.PAID_PLATFORM, 0.70, D.LAPTOP_PC, 1),
    (2, S.EVENING, P.PAID_PLATFORM, 0.70, D.LAPTOP_PC, 1),
    (3, S.EVENING, P.PAID_PLATFORM, 0.70, D.LAPTOP_PC, 2),
    (4, S.EVENING, P.PAID_PLATFORM, 0.43, D.TABLET, 1),
    (5, S.AFTERNOON, P.PAID_PLATFORM, 0.50, D.SMARTPHONE, 1),
    (6, S.EVENING, P.PAID_PLATFORM, 0.62, D.SMART_TV, 2),
    (6, S.NIGHT, P.PAID_PLATFORM, 0.25, D.SMART_TV, 2),
    (7, S.EVENING, P.PAID_PLATFORM, 0.87, D.SMART_TV, 2),
    # free platforms
    (1, S.AFTERNOON, P.FREE_PLATFORM, 0.73, D.LAPTOP_PC, 1),
    (2, S.MORNING, P.FREE_PLATFORM, 0.40, D.SMARTPHONE, 1),
    (3, S.AFTERNOON, P.FREE_PLATFORM, 0.73, D.LAPTOP_PC, 1),
    (4, S.MORNING, P.FREE_PLATFORM, 0.40, D.SMARTPHONE, 1),
    (5, S.EVENING, P.FREE_PLATFORM, 0.09, D.TABLET, 1),
    (6, S.AFTERNOON, P.FREE_PLATFORM, 0.45, D.SMART_TV, 2),
    (7, S.MORNING, P.FREE_PLATFORM, 0.38, D.SMARTPHONE, 1),
    # social media
    (1, S.MORNING, P.SOCIAL_MEDIA, 0.35, D.SMARTPHONE, 1),
    (2, S.AFTERNOON, P.SOCIAL_MEDIA, 0.35, D.SMARTPHONE, 1),
    (3, S.NIGHT, P.SOCIAL_MEDIA, 0.35, D.SMARTPHONE, 1),
    (4, S.AFTERNOON, P.SOCIAL_MEDIA, 0.35, D.SMARTPHONE, 1),
    (5, S.MORNING, P.SOCIAL_MEDIA, 0.35, D.SMARTPHONE, 1),
    (6, S.MORNING, P.SOCIAL_MEDIA, 0.33, D.SMARTPHONE, 1),
    (7, S.AFTERNOON, P.SOCIAL_MEDIA, 0.15, D.LAPTOP_PC, 1),
    # streams from TV stations
    (1, S.EVENING, P.TV_STATION_STREAM, 0.40, D.LAPTOP_PC, 1),
    (2, S.AFTERNOON, P.TV_STATION_STREAM, 0.40, D.LAPTOP_PC, 1),
    (3, S.EVENING, P.TV_STATION_STREAM, 0.41, D.LAPTOP_PC, 1),
    (4, S.EVENING, P.TV_STATION_STREAM, 0.25, D.TABLET, 1),
    (5, S.EVENING, P.TV_STATION_STREAM, 0.20, D.TABLET, 1),
    (7, S.AFTERNOON, P.TV_STATION_STREAM, 0.30, D.SMART_TV, 2),
    # regular broadcast TV, outside the footprint model
    (5, S.EVENING, P.BROADCAST_TV, 1.50, D.SMART_TV, 2),
]


def synth_average_participant() -> DiaryDataset:
    """The sample-average streaming week as a one-participant dataset."""
    profile = ParticipantProfile(participant_id=AVERAGE_PARTICIPANT)
    entries = [
        DiaryEntry(AVERAGE_PARTICIPANT, day, slot, platform, hours, device, audience)
        for day, slot, platform, hours, device, audience in _WEEK
    ]
    return check_dataset([profile], entries)
