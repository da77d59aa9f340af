"""Greenhouse-gas footprint of online video streaming from usage diaries."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    DeviceKind, ModelParams, ParamsError, Resolution, bitrate_for, default_params,
    load_params, save_params,
)
from .diary import (  # noqa: E402
    DaytimeSlot, DiaryDataset, DiaryEntry, DiaryError, ParticipantProfile, PlatformCategory,
    parse_dataset, weekly_device_hours,
)
from .fixtures import synth_average_participant  # noqa: E402
from .engine import (  # noqa: E402
    annual_budget_share, footprint, intensity_table, operation_kg, production_kg, traffic_kg,
)

__all__ = [
    "DeviceKind", "ModelParams", "ParamsError", "Resolution", "bitrate_for", "default_params",
    "load_params", "save_params", "DaytimeSlot", "DiaryDataset", "DiaryEntry", "DiaryError",
    "ParticipantProfile", "PlatformCategory", "parse_dataset", "weekly_device_hours",
    "synth_average_participant", "annual_budget_share", "footprint", "intensity_table",
    "operation_kg", "production_kg", "traffic_kg",
]
