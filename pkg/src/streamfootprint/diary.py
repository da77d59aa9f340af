"""Usage diaries: data model, CSV parsing/validation and serialization.

Two comma-separated UTF-8 files with a mandatory header row describe a
diary study. Columns are fixed and must appear in this order.

Diary file (one row per participant x day x slot x platform)::

    participant_id,day,slot,platform,hours,device,audience,parallel_activities

* ``day`` 1..7 (Monday = 1); ``slot`` one of morning, afternoon, evening, night
* ``platform`` one of free_platform, paid_platform, social_media,
  tv_station_stream, broadcast_tv
* ``hours`` 0..6; ``device`` smartphone, tablet, laptop_pc or smart_tv (may be
  blank on broadcast_tv rows and on zero-hour rows)
* ``audience`` persons watching together, >= 1 (blank means 1)
* ``parallel_activities`` ``;``-separated labels from :data:`ACTIVITIES`

Profile file (one row per participant)::

    participant_id,age,gender,education_level,income_band,employment,
    paid_membership,mobile_flatrate,digital_literacy,impact_knowledge,
    personal_norm,environmental_concern,resolution_free_platform,
    resolution_paid_platform,resolution_social_media,resolution_tv_station_stream

Blank covariate cells are missing values. ``mobile_flatrate`` is a GB figure,
``unlimited`` or ``unknown``. Resolution cells take r360p, r480p, r720p,
r1080p, automatic, unknown or dont_know (read as automatic); each diary entry
inherits the resolution its participant reported for the platform.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .params import DeviceKind, Resolution

SLOT_HOURS = 6.0


class DiaryError(ValueError):
    """Hard validation failure; ``errors`` holds one message per problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


class PlatformCategory(str, Enum):
    FREE_PLATFORM = "free_platform"
    PAID_PLATFORM = "paid_platform"
    SOCIAL_MEDIA = "social_media"
    TV_STATION_STREAM = "tv_station_stream"
    BROADCAST_TV = "broadcast_tv"

    def __str__(self) -> str:
        return self.value

    @property
    def in_model(self) -> bool:
        """Broadcast TV is recorded but carries no streaming footprint."""
        return self is not PlatformCategory.BROADCAST_TV


STREAMING_PLATFORMS = tuple(p for p in PlatformCategory if p.in_model)


class DaytimeSlot(str, Enum):
    MORNING = "morning"  # 6-12
    AFTERNOON = "afternoon"  # 12-18
    EVENING = "evening"  # 18-24
    NIGHT = "night"  # 0-6

    def __str__(self) -> str:
        return self.value

    @property
    def hours(self) -> float:
        return SLOT_HOURS


ACTIVITIES = frozenset(
    {"housework", "mobility", "waiting", "work", "grooming", "sports", "surfing", "other"}
)

GENDERS = ("female", "male", "other")
EDUCATION_LEVELS = ("primary", "secondary", "tertiary")
INCOME_BANDS = ("low", "middle", "high")
EMPLOYMENT = ("full_time", "half_time", "unemployed")
SCORE_RANGE = (1.0, 5.0)

DIARY_COLUMNS = (
    "participant_id", "day", "slot", "platform", "hours", "device", "audience",
    "parallel_activities",
)
PROFILE_COLUMNS = (
    "participant_id", "age", "gender", "education_level", "income_band", "employment",
    "paid_membership", "mobile_flatrate", "digital_literacy", "impact_knowledge",
    "personal_norm", "environmental_concern",
) + tuple(f"resolution_{p}" for p in STREAMING_PLATFORMS)


@dataclass(frozen=True)
class DiaryEntry:
    participant_id: str
    day_index: int
    slot: DaytimeSlot
    platform: PlatformCategory
    hours: float
    device: Optional[DeviceKind]
    audience: int = 1
    resolution: Resolution = Resolution.AUTOMATIC
    parallel_activities: frozenset = frozenset()

    @property
    def key(self):
        return (self.participant_id, self.day_index, self.slot, self.platform)


@dataclass(frozen=True)
class ParticipantProfile:
    participant_id: str
    age: Optional[float] = None
    gender: Optional[str] = None
    education_level: Optional[str] = None
    income_band: Optional[str] = None
    employment: Optional[str] = None
    paid_membership: Optional[bool] = None
    # GB per month; math.inf for an unlimited plan, None when unknown
    mobile_flatrate_gb: Optional[float] = None
    digital_literacy: Optional[float] = None
    impact_knowledge: Optional[float] = None
    personal_norm: Optional[float] = None
    environmental_concern: Optional[float] = None
    resolutions: tuple = field(
        default_factory=lambda: tuple((p, Resolution.AUTOMATIC) for p in STREAMING_PLATFORMS)
    )

    def resolution_for(self, platform: PlatformCategory) -> Resolution:
        return dict(self.resolutions).get(platform, Resolution.AUTOMATIC)


@dataclass(frozen=True)
class DiaryDataset:
    participants: tuple
    entries: tuple
    warnings: tuple = ()

    @property
    def participant_ids(self) -> list[str]:
        return [p.participant_id for p in self.participants]

    def participant(self, participant_id: str) -> ParticipantProfile:
        for p in self.participants:
            if p.participant_id == participant_id:
                return p
        raise KeyError(f"unknown participant {participant_id!r}")

    def entries_for(self, participant_id: str) -> list[DiaryEntry]:
        self.participant(participant_id)
        return [e for e in self.entries if e.participant_id == participant_id]


# -- validation -------------------------------------------------------------------


def check_dataset(participants: Iterable[ParticipantProfile], entries: Iterable[DiaryEntry],
                  row_numbers: Optional[list[int]] = None) -> DiaryDataset:
    """Validate cross-row invariants and collect soft warnings.

    Hard problems (orphan participant ids, duplicate keys) raise
    :class:`DiaryError`; oversubscribed slots and multiple devices per
    platform-day are reported as warnings.
    """
    participants = tuple(participants)
    entries = tuple(entries)
    rows = row_numbers or [i + 1 for i in range(len(entries))]
    errors = []

    ids = set()
    for p in participants:
        if p.participant_id in ids:
            errors.append(f"duplicate participant_id {p.participant_id!r} in profiles")
        ids.add(p.participant_id)

    seen = {}
    for row, e in zip(rows, entries):
        if e.participant_id not in ids:
            errors.append(f"row {row}: orphan participant_id {e.participant_id!r}")
        if e.key in seen:
            errors.append(f"row {row}: duplicate key {_fmt_key(e.key)} (first at row {seen[e.key]})")
        else:
            seen[e.key] = row
    if errors:
        raise DiaryError(errors)

    warnings = []
    slot_totals = defaultdict(float)
    devices_per_day = defaultdict(set)
    for e in entries:
        slot_totals[(e.participant_id, e.day_index, e.slot)] += e.hours
        if e.device is not None and e.hours > 0:
            devices_per_day[(e.participant_id, e.day_index, e.platform)].add(e.device)
    for (pid, day, slot), total in slot_totals.items():
        if total > SLOT_HOURS + 1e-9:
            warnings.append(
                f"participant {pid} day {day} {slot}: slot oversubscribed "
                f"(multi-watching?) {total:g} h > {SLOT_HOURS:g} h"
            )
    for (pid, day, platform), devs in devices_per_day.items():
        if len(devs) > 1:
            names = ", ".join(sorted(d.value for d in devs))
            warnings.append(
                f"participant {pid} day {day} {platform}: several main devices ({names})"
            )
    return DiaryDataset(participants=participants, entries=entries, warnings=tuple(warnings))


def _fmt_key(key) -> str:
    pid, day, slot, platform = key
    return f"({pid}, day {day}, {slot}, {platform})"


# -- parsing ------------------------------------------------------------------------


def _enum(cls, text, what):
    try:
        return cls(text.strip())
    except ValueError:
        raise ValueError(f"unknown {what} {text!r}") from None


def _parse_resolution(text: str) -> Resolution:
    text = text.strip()
    if text == "":
        return Resolution.UNKNOWN
    if text == "dont_know":
        return Resolution.AUTOMATIC
    return _enum(Resolution, text, "resolution")


def _optional_float(text: str, name: str, bounds=None) -> Optional[float]:
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{name} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    if bounds is not None and not bounds[0] <= value <= bounds[1]:
        raise ValueError(f"{name} = {value:g} outside [{bounds[0]:g}, {bounds[1]:g}]")
    return value


def _optional_choice(text: str, name: str, choices) -> Optional[str]:
    text = text.strip()
    if text == "":
        return None
    if text not in choices:
        raise ValueError(f"unknown {name} {text!r} (expected one of {', '.join(choices)})")
    return text


def _parse_bool(text: str, name: str) -> Optional[bool]:
    text = text.strip().lower()
    if text == "":
        return None
    if text in ("1", "yes", "true"):
        return True
    if text in ("0", "no", "false"):
        return False
    raise ValueError(f"{name} must be yes/no, got {text!r}")


def _parse_flatrate(text: str) -> Optional[float]:
    text = text.strip().lower()
    if text in ("", "unknown"):
        return None
    if text == "unlimited":
        return math.inf
    value = _optional_float(text, "mobile_flatrate")
    if value < 0:
        raise ValueError(f"mobile_flatrate = {value:g} must be >= 0")
    return value


def _read_rows(text: str, expected: tuple, label: str):
    if text.strip() == "":
        return []
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    header = [h.strip() for h in header]
    if tuple(header) != expected:
        raise DiaryError(
            [f"{label}: header must be {','.join(expected)}; got {','.join(header)}"]
        )
    rows = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(c.strip() == "" for c in row):
            continue
        rows.append((line_no, row))
    return rows


def parse_profiles(text: str, source: str = "profiles") -> list[ParticipantProfile]:
    profiles, errors = [], []
    for line_no, row in _read_rows(text, PROFILE_COLUMNS, source):
        try:
            if len(row) != len(PROFILE_COLUMNS):
                raise ValueError(f"expected {len(PROFILE_COLUMNS)} fields, got {len(row)}")
            cells = dict(zip(PROFILE_COLUMNS, row))
            pid = cells["participant_id"].strip()
            if not pid:
                raise ValueError("empty participant_id")
            resolutions = tuple(
                (p, _parse_resolution(cells[f"resolution_{p}"])) for p in STREAMING_PLATFORMS
            )
            profiles.append(ParticipantProfile(
                participant_id=pid,
                age=_optional_float(cells["age"], "age", (0, 130)),
                gender=_optional_choice(cells["gender"], "gender", GENDERS),
                education_level=_optional_choice(cells["education_level"], "education_level", EDUCATION_LEVELS),
                income_band=_optional_choice(cells["income_band"], "income_band", INCOME_BANDS),
                employment=_optional_choice(cells["employment"], "employment", EMPLOYMENT),
                paid_membership=_parse_bool(cells["paid_membership"], "paid_membership"),
                mobile_flatrate_gb=_parse_flatrate(cells["mobile_flatrate"]),
                digital_literacy=_optional_float(cells["digital_literacy"], "digital_literacy", SCORE_RANGE),
                impact_knowledge=_optional_float(cells["impact_knowledge"], "impact_knowledge", SCORE_RANGE),
                personal_norm=_optional_float(cells["personal_norm"], "personal_norm", SCORE_RANGE),
                environmental_concern=_optional_float(cells["environmental_concern"], "environmental_concern"),
                resolutions=resolutions,
            ))
        except ValueError as exc:
            errors.append(f"{source} row {line_no}: {exc}")
    if errors:
        raise DiaryError(errors)
    return profiles


def _parse_entry(cells: dict) -> DiaryEntry:
    pid = cells["participant_id"].strip()
    if not pid:
        raise ValueError("empty participant_id")
    try:
        day = int(cells["day"].strip())
    except ValueError:
        raise ValueError(f"day is not an integer: {cells['day']!r}") from None
    if not 1 <= day <= 7:
        raise ValueError(f"day {day} out of range 1..7")
    slot = _enum(DaytimeSlot, cells["slot"], "slot")
    platform = _enum(PlatformCategory, cells["platform"], "platform")
    hours = _optional_float(cells["hours"], "hours")
    if hours is None:
        raise ValueError("hours is empty")
    if not 0 <= hours <= SLOT_HOURS:
        raise ValueError(f"hours out of range (0..{SLOT_HOURS:g}): {hours:g}")
    device_text = cells["device"].strip()
    if device_text:
        device = _enum(DeviceKind, device_text, "device")
    elif platform.in_model and hours > 0:
        raise ValueError(f"device is required for {platform} rows with hours > 0")
    else:
        device = None
    audience_text = cells["audience"].strip()
    try:
        audience = int(audience_text) if audience_text else 1
    except ValueError:
        raise ValueError(f"audience is not an integer: {audience_text!r}") from None
    if audience < 1:
        raise ValueError(f"audience {audience} must be >= 1")
    labels = [a.strip() for a in cells["parallel_activities"].split(";") if a.strip()]
    unknown = sorted(set(labels) - ACTIVITIES)
    if unknown:
        raise ValueError(f"unknown parallel activity {', '.join(unknown)}")
    return DiaryEntry(pid, day, slot, platform, hours, device, audience,
                      Resolution.AUTOMATIC, frozenset(labels))


def parse_entries(text: str, source: str = "diary") -> tuple[list[DiaryEntry], list[int]]:
    entries, lines, errors = [], [], []
    for line_no, row in _read_rows(text, DIARY_COLUMNS, source):
        try:
            if len(row) != len(DIARY_COLUMNS):
                raise ValueError(f"expected {len(DIARY_COLUMNS)} fields, got {len(row)}")
            entries.append(_parse_entry(dict(zip(DIARY_COLUMNS, row))))
            lines.append(line_no)
        except ValueError as exc:
            errors.append(f"{source} row {line_no}: {exc}")
    if errors:
        raise DiaryError(errors)
    return entries, lines


def parse_dataset_text(diary_text: str, profile_text: str) -> DiaryDataset:
    profiles = parse_profiles(profile_text)
    entries, lines = parse_entries(diary_text)
    by_id = {p.participant_id: p for p in profiles}
    resolved = []
    for e in entries:
        p = by_id.get(e.participant_id)
        if p is not None and e.platform.in_model:
            e = replace(e, resolution=p.resolution_for(e.platform))
        resolved.append(e)
    return check_dataset(profiles, resolved, lines)


def parse_dataset(diary_path, profile_path) -> DiaryDataset:
    """Read and validate a diary file and its participant profile file."""
    diary_text = Path(diary_path).read_text(encoding="utf-8")
    profile_text = Path(profile_path).read_text(encoding="utf-8")
    return parse_dataset_text(diary_text, profile_text)


# -- serialization ---------------------------------------------------------------------


def _fmt_num(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def dump_entries(entries: Iterable[DiaryEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DIARY_COLUMNS)
    for e in entries:
        writer.writerow([
            e.participant_id, e.day_index, e.slot.value, e.platform.value, _fmt_num(e.hours),
            e.device.value if e.device else "", e.audience,
            ";".join(sorted(e.parallel_activities)),
        ])
    return buf.getvalue()


def dump_profiles(profiles: Iterable[ParticipantProfile]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PROFILE_COLUMNS)
    for p in profiles:
        if p.paid_membership is None:
            member = ""
        else:
            member = "yes" if p.paid_membership else "no"
        if p.mobile_flatrate_gb is None:
            flat = "unknown"
        elif math.isinf(p.mobile_flatrate_gb):
            flat = "unlimited"
        else:
            flat = _fmt_num(p.mobile_flatrate_gb)
        writer.writerow([
            p.participant_id, _fmt_num(p.age), p.gender or "", p.education_level or "",
            p.income_band or "", p.employment or "", member, flat,
            _fmt_num(p.digital_literacy), _fmt_num(p.impact_knowledge),
            _fmt_num(p.personal_norm), _fmt_num(p.environmental_concern),
            *(p.resolution_for(pl).value for pl in STREAMING_PLATFORMS),
        ])
    return buf.getvalue()


def write_dataset(ds: DiaryDataset, diary_path, profile_path) -> None:
    Path(diary_path).write_text(dump_entries(ds.entries), encoding="utf-8")
    Path(profile_path).write_text(dump_profiles(ds.participants), encoding="utf-8")


# -- aggregation -------------------------------------------------------------------------


def weekly_device_hours(ds: DiaryDataset, participant: str) -> dict[DeviceKind, float]:
    """Weekly streaming hours per device for one participant (broadcast TV excluded)."""
    hours = defaultdict(list)
    for e in ds.entries_for(participant):
        if e.platform.in_model and e.device is not None:
            hours[e.device].append(e.hours)
    return {d: math.fsum(hours[d]) for d in DeviceKind if d in hours}


def weekly_hours(ds: DiaryDataset, participant: str) -> float:
    return math.fsum(e.hours for e in ds.entries_for(participant) if e.platform.in_model)


def daily_hours(ds: DiaryDataset, participant: str) -> dict[int, float]:
    """In-model streaming hours per day 1..7 (zero-filled)."""
    per_day = defaultdict(list)
    for e in ds.entries_for(participant):
        if e.platform.in_model:
            per_day[e.day_index].append(e.hours)
    return {d: math.fsum(per_day[d]) for d in range(1, 8)}
