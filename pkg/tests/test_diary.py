import math

import pytest

from streamfootprint.diary import (
    DIARY_COLUMNS, PROFILE_COLUMNS, DaytimeSlot, DiaryEntry, DiaryError, ParticipantProfile,
    PlatformCategory, check_dataset, daily_hours, dump_entries, dump_profiles, parse_dataset,
    parse_dataset_text, weekly_device_hours, weekly_hours, write_dataset,
)
from streamfootprint.params import DeviceKind, Resolution

DIARY_HEADER = ",".join(DIARY_COLUMNS)
PROFILE_HEADER = ",".join(PROFILE_COLUMNS)
PROFILE_ROW = "a,30,female,tertiary,middle,full_time,yes,4,3.5,2,3,4,r360p,dont_know,,automatic"


def diary(*rows):
    return "\n".join([DIARY_HEADER, *rows]) + "\n"


def profiles(*rows):
    return "\n".join([PROFILE_HEADER, *(rows or (PROFILE_ROW,))]) + "\n"


def test_average_fixture_matches_sample_means(avg):
    hours = weekly_device_hours(avg, "avg")
    assert hours == {
        DeviceKind.SMARTPHONE: 3.76, DeviceKind.TABLET: 0.97,
        DeviceKind.LAPTOP_PC: 4.92, DeviceKind.SMART_TV: 2.49,
    }
    assert math.isclose(weekly_hours(avg, "avg"), 12.14)
    assert avg.warnings == ()


def test_parse_profile_fields():
    ds = parse_dataset_text(diary("a,1,evening,free_platform,1.5,smart_tv,2,housework;work"), profiles())
    p = ds.participant("a")
    assert p.age == 30 and p.gender == "female" and p.paid_membership is True
    assert p.mobile_flatrate_gb == 4
    assert p.resolution_for(PlatformCategory.FREE_PLATFORM) is Resolution.R360P
    # "don't know" reads as automatic, a blank cell as unknown
    assert p.resolution_for(PlatformCategory.PAID_PLATFORM) is Resolution.AUTOMATIC
    assert p.resolution_for(PlatformCategory.SOCIAL_MEDIA) is Resolution.UNKNOWN
    (e,) = ds.entries
    assert e.resolution is Resolution.R360P
    assert e.audience == 2
    assert e.parallel_activities == frozenset({"housework", "work"})


def test_flatrate_variants():
    row_unl = PROFILE_ROW.replace(",yes,4,", ",yes,unlimited,")
    row_unk = PROFILE_ROW.replace("a,", "b,", 1).replace(",yes,4,", ",,unknown,")
    ds = parse_dataset_text(diary(), profiles(row_unl, row_unk))
    assert math.isinf(ds.participant("a").mobile_flatrate_gb)
    assert ds.participant("b").mobile_flatrate_gb is None
    assert ds.participant("b").paid_membership is None


def test_broadcast_row_needs_no_device():
    ds = parse_dataset_text(diary("a,1,evening,broadcast_tv,2,,,"), profiles())
    assert ds.entries[0].device is None


@pytest.mark.parametrize("row,message", [
    ("a,1,evening,free_platform,7,smart_tv,1,", "hours out of range"),
    ("a,1,evening,free_platform,-1,smart_tv,1,", "hours out of range"),
    ("a,8,evening,free_platform,1,smart_tv,1,", "day 8"),
    ("a,1,dusk,free_platform,1,smart_tv,1,", "unknown slot"),
    ("a,1,evening,cinema,1,smart_tv,1,", "unknown platform"),
    ("a,1,evening,free_platform,1,toaster,1,", "unknown device"),
    ("a,1,evening,free_platform,1,,1,", "device is required"),
    ("a,1,evening,free_platform,1,smart_tv,0,", "audience"),
    ("a,1,evening,free_platform,1,smart_tv,1,juggling", "parallel activity"),
    ("a,1,evening,free_platform,1,smart_tv", "expected 8 fields"),
])
def test_row_errors_carry_line_numbers(row, message):
    with pytest.raises(DiaryError) as info:
        parse_dataset_text(diary("a,2,evening,free_platform,1,smart_tv,1,", row), profiles())
    assert len(info.value.errors) == 1
    assert info.value.errors[0].startswith("diary row 3:")
    assert message in info.value.errors[0]


def test_all_row_errors_collected():
    with pytest.raises(DiaryError) as info:
        parse_dataset_text(diary("a,9,evening,free_platform,1,smart_tv,1,",
                                 "a,1,evening,free_platform,99,smart_tv,1,"), profiles())
    assert len(info.value.errors) == 2


def test_orphan_and_duplicate_keys():
    with pytest.raises(DiaryError) as info:
        parse_dataset_text(diary("zz,1,evening,free_platform,1,smart_tv,1,",
                                 "a,1,evening,free_platform,1,smart_tv,1,",
                                 "a,1,evening,free_platform,2,laptop_pc,1,"), profiles())
    text = str(info.value)
    assert "orphan participant_id 'zz'" in text
    assert "duplicate key" in text and "row 4" in text


def test_duplicate_participant():
    with pytest.raises(DiaryError, match="duplicate participant_id"):
        parse_dataset_text(diary(), profiles(PROFILE_ROW, PROFILE_ROW))


def test_bad_header():
    with pytest.raises(DiaryError, match="header"):
        parse_dataset_text("participant_id,day\n", profiles())


def test_empty_files_give_empty_dataset(tmp_path):
    d, p = tmp_path / "d.csv", tmp_path / "p.csv"
    d.write_text("", encoding="utf-8")
    p.write_text("", encoding="utf-8")
    ds = parse_dataset(d, p)
    assert ds.participants == () and ds.entries == ()


def test_multiwatching_warning_is_not_an_error():
    ds = parse_dataset_text(diary("a,1,evening,free_platform,4,smart_tv,1,",
                                  "a,1,evening,paid_platform,4,laptop_pc,1,"), profiles())
    assert len(ds.warnings) == 1
    assert "oversubscribed" in ds.warnings[0]


def test_several_devices_per_platform_day_warns():
    ds = parse_dataset_text(diary("a,1,evening,free_platform,1,smart_tv,1,",
                                  "a,1,morning,free_platform,1,smartphone,1,"), profiles())
    assert any("several main devices" in w for w in ds.warnings)


def test_dump_and_parse_round_trip(tmp_path, avg):
    d, p = tmp_path / "d.csv", tmp_path / "p.csv"
    write_dataset(avg, d, p)
    back = parse_dataset(d, p)
    assert back.participants == avg.participants
    assert back.entries == avg.entries
    assert dump_entries(back.entries) == dump_entries(avg.entries)
    assert dump_profiles(back.participants) == dump_profiles(avg.participants)


def test_daily_hours_zero_filled():
    ds = check_dataset([ParticipantProfile("x")], [
        DiaryEntry("x", 3, DaytimeSlot.MORNING, PlatformCategory.SOCIAL_MEDIA, 1.0, DeviceKind.SMARTPHONE),
        DiaryEntry("x", 3, DaytimeSlot.EVENING, PlatformCategory.BROADCAST_TV, 2.0, None),
    ])
    per_day = daily_hours(ds, "x")
    assert per_day == {1: 0.0, 2: 0.0, 3: 1.0, 4: 0.0, 5: 0.0, 6: 0.0, 7: 0.0}


def test_unknown_participant_lookup(avg):
    with pytest.raises(KeyError):
        avg.entries_for("nobody")
