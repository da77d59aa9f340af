"""Weekly GWP of streaming: device production, device operation, data traffic.

Per streamed hour on device ``i`` at resolution ``r``::

    production = E_i / (L_i * 365 * U_i)          embodied emissions, allocated
                                                  by share of daily use time
    operation  = P_i[kW] * grid_device
    traffic    = bitrate(i, r) * rho * grid_network

and a diary week sums ``hours * (production + operation + traffic)`` over
all in-model entries. All results are in kg CO2-eq.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .diary import DaytimeSlot, DiaryDataset, DiaryEntry, PlatformCategory
from .params import DEVICE_ORDER, DeviceKind, ModelParams, Resolution, bitrate_for

WEEKS_PER_YEAR = 52
DEFAULT_BUDGET_KG_PER_YEAR = 1609.0

AXES = ("device", "platform", "day", "slot")


@dataclass(frozen=True)
class Components:
    production_kg: float = 0.0
    operation_kg: float = 0.0
    traffic_kg: float = 0.0
    hours: float = 0.0

    @property
    def total_kg(self) -> float:
        return self.production_kg + self.operation_kg + self.traffic_kg

    @staticmethod
    def fsum(items: Iterable["Components"]) -> "Components":
        items = list(items)
        return Components(
            math.fsum(c.production_kg for c in items),
            math.fsum(c.operation_kg for c in items),
            math.fsum(c.traffic_kg for c in items),
            math.fsum(c.hours for c in items),
        )


ZERO = Components()


@dataclass(frozen=True)
class FootprintBreakdown:
    """Footprint cells keyed by (device, platform, day, slot) plus marginals."""

    participant_id: str
    cells: dict

    def marginal(self, axis: str) -> dict:
        if axis not in AXES:
            raise ValueError(f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")
        idx = AXES.index(axis)
        groups = defaultdict(list)
        for key in sorted(self.cells, key=_cell_sort_key):
            groups[key[idx]].append(self.cells[key])
        rank = _AXIS_RANK[axis]
        return {k: Components.fsum(groups[k]) for k in sorted(groups, key=rank)}

    @property
    def by_device(self) -> dict:
        return self.marginal("device")

    @property
    def by_platform(self) -> dict:
        return self.marginal("platform")

    @property
    def by_day(self) -> dict:
        return self.marginal("day")

    @property
    def by_slot(self) -> dict:
        return self.marginal("slot")

    def by_platform_device(self) -> dict:
        groups = defaultdict(list)
        for key in sorted(self.cells, key=_cell_sort_key):
            groups[(key[1], key[0])].append(self.cells[key])
        order = sorted(groups, key=lambda k: (_PLATFORM_RANK[k[0]], _DEVICE_RANK[k[1]]))
        return {k: Components.fsum(groups[k]) for k in order}

    @property
    def grand(self) -> Components:
        return Components.fsum(self.cells[k] for k in sorted(self.cells, key=_cell_sort_key))

    @property
    def total_kg(self) -> float:
        return self.grand.total_kg


_DEVICE_RANK = {d: i for i, d in enumerate(DeviceKind)}
_PLATFORM_RANK = {p: i for i, p in enumerate(PlatformCategory)}
_SLOT_RANK = {s: i for i, s in enumerate(DaytimeSlot)}
_AXIS_RANK = {
    "device": _DEVICE_RANK.__getitem__,
    "platform": _PLATFORM_RANK.__getitem__,
    "day": int,
    "slot": _SLOT_RANK.__getitem__,
}


def _cell_sort_key(key):
    device, platform, day, slot = key
    return (_DEVICE_RANK[device], _PLATFORM_RANK[platform], day, _SLOT_RANK[slot])


@dataclass(frozen=True)
class IntensityRow:
    device: DeviceKind
    production_kg_per_h: float
    electricity_kg_per_h: float
    traffic_kg_per_h: float

    @property
    def total_kg_per_h(self) -> float:
        return self.production_kg_per_h + self.electricity_kg_per_h + self.traffic_kg_per_h


def _production_per_hour(params: ModelParams, device: DeviceKind) -> float:
    return params.devices[device].production_kg_per_hour


def _operation_per_hour(params: ModelParams, device: DeviceKind) -> float:
    return params.devices[device].power_watts / 1000.0 * params.grid_device.kg_per_kwh


def _traffic_per_hour(params: ModelParams, device: DeviceKind, resolution: Resolution) -> float:
    return (bitrate_for(params, device, resolution) * params.network.total()
            * params.grid_network.kg_per_kwh)


def production_kg(params: ModelParams, device: DeviceKind, streaming_hours_day: float) -> float:
    """Embodied emissions allocated to ``streaming_hours_day`` of streaming."""
    _check_hours(streaming_hours_day)
    return _production_per_hour(params, device) * streaming_hours_day


def operation_kg(params: ModelParams, device: DeviceKind, hours: float) -> float:
    _check_hours(hours)
    return _operation_per_hour(params, device) * hours


def traffic_kg(params: ModelParams, device: DeviceKind, resolution: Resolution, hours: float) -> float:
    _check_hours(hours)
    return _traffic_per_hour(params, device, resolution) * hours


def _check_hours(hours: float) -> None:
    if not hours >= 0:
        raise ValueError(f"hours must be >= 0, got {hours}")


def entry_components(params: ModelParams, entry: DiaryEntry, per_viewer: bool = False) -> Components:
    """Footprint of a single diary entry (zero for broadcast TV)."""
    if not entry.platform.in_model or entry.device is None:
        return Components(hours=0.0)
    h = entry.hours
    prod = _production_per_hour(params, entry.device) * h
    op = _operation_per_hour(params, entry.device) * h
    traffic = _traffic_per_hour(params, entry.device, entry.resolution) * h
    if per_viewer:
        # non-default: share the footprint among everyone watching together
        prod, op, traffic = prod / entry.audience, op / entry.audience, traffic / entry.audience
    return Components(prod, op, traffic, h)


def footprint_of_entries(params: ModelParams, entries: Iterable[DiaryEntry],
                         participant_id: str = "", per_viewer: bool = False) -> FootprintBreakdown:
    groups = defaultdict(list)
    for e in entries:
        if not e.platform.in_model or e.device is None:
            continue
        groups[(e.device, e.platform, e.day_index, e.slot)].append(
            entry_components(params, e, per_viewer)
        )
    cells = {k: Components.fsum(groups[k]) for k in sorted(groups, key=_cell_sort_key)}
    return FootprintBreakdown(participant_id, cells)


def footprint(params: ModelParams, ds: DiaryDataset, participant: str,
              per_viewer: bool = False) -> FootprintBreakdown:
    """Weekly footprint of one participant (functional unit: one person, one week).

    Raises:
        KeyError: if ``participant`` is not in the dataset.
    """
    return footprint_of_entries(params, ds.entries_for(participant), participant, per_viewer)


def cohort_footprints(params: ModelParams, ds: DiaryDataset, per_viewer: bool = False) -> dict:
    return {pid: footprint(params, ds, pid, per_viewer) for pid in sorted(ds.participant_ids)}


def intensity_table(params: ModelParams) -> list[IntensityRow]:
    """Per-hour GWP intensity of each device at its native resolution."""
    return [
        IntensityRow(
            device=d,
            production_kg_per_h=_production_per_hour(params, d),
            electricity_kg_per_h=_operation_per_hour(params, d),
            traffic_kg_per_h=_traffic_per_hour(params, d, Resolution.AUTOMATIC),
        )
        for d in DEVICE_ORDER
    ]


def annualize(weekly_kg: float) -> float:
    return weekly_kg * WEEKS_PER_YEAR


def annual_budget_share(weekly_kg: float, budget_kg_per_year: float = DEFAULT_BUDGET_KG_PER_YEAR) -> float:
    """Fraction of an annual per-capita CO2 budget taken by a weekly footprint."""
    if not budget_kg_per_year > 0:
        raise ValueError(f"budget must be positive, got {budget_kg_per_year}")
    if not weekly_kg >= 0:
        raise ValueError(f"weekly_kg must be >= 0, got {weekly_kg}")
    return weekly_kg / (budget_kg_per_year / WEEKS_PER_YEAR)
