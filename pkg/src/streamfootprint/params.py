"""Model parameters for the streaming footprint model.

Holds device life-cycle data, the resolution-to-bitrate table, network
energy intensities and the two grid emission factors, each value tagged with
a provenance string. Parameter sets are immutable; use :func:`with_overrides`
to derive modified copies and :func:`save_params` / :func:`load_params` for
the YAML file format.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

import yaml

DAYS_PER_YEAR = 365


class ParamsError(ValueError):
    """Raised when a parameter set is malformed or violates an invariant."""


class DeviceKind(str, Enum):
    SMARTPHONE = "smartphone"
    TABLET = "tablet"
    LAPTOP_PC = "laptop_pc"
    SMART_TV = "smart_tv"

    def __str__(self) -> str:
        return self.value


class Resolution(str, Enum):
    R360P = "r360p"
    R480P = "r480p"
    R720P = "r720p"
    R1080P = "r1080p"
    AUTOMATIC = "automatic"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value

    @property
    def is_concrete(self) -> bool:
        return self not in (Resolution.AUTOMATIC, Resolution.UNKNOWN)


# low to high; bitrates must be non-decreasing along this order
RESOLUTION_ORDER = (Resolution.R360P, Resolution.R480P, Resolution.R720P, Resolution.R1080P)

# column order of the per-device report tables
DEVICE_ORDER = (DeviceKind.LAPTOP_PC, DeviceKind.SMARTPHONE, DeviceKind.SMART_TV, DeviceKind.TABLET)


def parse_device(value: str) -> DeviceKind:
    try:
        return DeviceKind(str(value).strip())
    except ValueError:
        raise ParamsError(f"unknown device kind {value!r}") from None


def parse_resolution(value: str) -> Resolution:
    try:
        return Resolution(str(value).strip())
    except ValueError:
        raise ParamsError(f"unknown resolution {value!r}") from None


@dataclass(frozen=True)
class DeviceProfile:
    """Life-cycle data for one end-device class.

    ``daily_use_hours`` is the overall daily use time of the device, used as
    the denominator when allocating embodied emissions to streaming.
    """

    kind: DeviceKind
    embodied_kg: float
    lifetime_years: float
    power_watts: float
    native_resolution: Resolution
    daily_use_hours: float

    def __post_init__(self):
        for name in ("embodied_kg", "lifetime_years", "power_watts", "daily_use_hours"):
            _check_finite(f"devices.{self.kind}.{name}", getattr(self, name), low=0.0, strict=True)
        if self.daily_use_hours > 24:
            raise ParamsError(
                f"devices.{self.kind}.daily_use_hours = {self.daily_use_hours} exceeds 24 h"
            )
        if not self.native_resolution.is_concrete:
            raise ParamsError(
                f"devices.{self.kind}.native_resolution must be a concrete resolution, "
                f"got {self.native_resolution}"
            )

    @property
    def production_kg_per_hour(self) -> float:
        """Embodied emissions allocated to one hour of streaming."""
        return self.embodied_kg / (self.lifetime_years * DAYS_PER_YEAR * self.daily_use_hours)


@dataclass(frozen=True)
class BitrateTable:
    """Data volume per streaming hour (GB/h) for each concrete resolution."""

    rates: Mapping[Resolution, float]

    def __post_init__(self):
        rates = {}
        for res, value in self.rates.items():
            if not res.is_concrete:
                raise ParamsError(f"bitrates.{res}: only concrete resolutions carry a bitrate")
            _check_finite(f"bitrates.{res}", value, low=0.0, strict=True)
            rates[res] = float(value)
        present = [r for r in RESOLUTION_ORDER if r in rates]
        for lo, hi in zip(present, present[1:]):
            if rates[hi] < rates[lo]:
                raise ParamsError(
                    f"bitrates must be non-decreasing in resolution: "
                    f"{hi} = {rates[hi]} < {lo} = {rates[lo]}"
                )
        ordered = {r: rates[r] for r in present}
        object.__setattr__(self, "rates", MappingProxyType(ordered))

    def __getitem__(self, res: Resolution) -> float:
        return self.rates[res]

    def __contains__(self, res) -> bool:
        return res in self.rates

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitrateTable):
            return NotImplemented
        return dict(self.rates) == dict(other.rates)

    def __hash__(self):
        return hash(tuple(self.rates.items()))


@dataclass(frozen=True)
class NetworkIntensity:
    """Electricity intensity of data transmission, kWh/GB, by segment."""

    access_kwh_per_gb: float
    core_edge_kwh_per_gb: float
    datacenter_kwh_per_gb: float

    def __post_init__(self):
        for name in ("access_kwh_per_gb", "core_edge_kwh_per_gb", "datacenter_kwh_per_gb"):
            _check_finite(f"network.{name}", getattr(self, name), low=0.0)

    def total(self) -> float:
        # decimal addition so 0.004 + 0.02 + 0.049 is 0.073, not 0.07300000000000001
        parts = (self.access_kwh_per_gb, self.core_edge_kwh_per_gb, self.datacenter_kwh_per_gb)
        return float(sum(Decimal(repr(float(p))) for p in parts))


@dataclass(frozen=True)
class GridIntensity:
    region_label: str
    kg_per_kwh: float

    def __post_init__(self):
        _check_finite(f"grid[{self.region_label}].kg_per_kwh", self.kg_per_kwh, low=0.0)
        if self.kg_per_kwh >= 2.0:
            raise ParamsError(
                f"grid[{self.region_label}].kg_per_kwh = {self.kg_per_kwh} is outside [0, 2)"
            )


@dataclass(frozen=True)
class ModelParams:
    """Complete parameter set of the footprint model."""

    devices: Mapping[DeviceKind, DeviceProfile]
    bitrates: BitrateTable
    network: NetworkIntensity
    grid_device: GridIntensity
    grid_network: GridIntensity
    provenance: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        devices = dict(self.devices)
        missing = [k.value for k in DeviceKind if k not in devices]
        if missing:
            raise ParamsError(f"missing device profile: {', '.join(missing)}")
        for kind, profile in devices.items():
            if profile.kind is not kind:
                raise ParamsError(f"device profile keyed {kind} describes {profile.kind}")
            if profile.native_resolution not in self.bitrates:
                raise ParamsError(
                    f"devices.{kind}.native_resolution {profile.native_resolution} "
                    f"has no bitrate entry"
                )
        ordered = {k: devices[k] for k in DeviceKind}
        object.__setattr__(self, "devices", MappingProxyType(ordered))
        object.__setattr__(self, "provenance", MappingProxyType(dict(sorted(self.provenance.items()))))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (
            dict(self.devices) == dict(other.devices)
            and self.bitrates == other.bitrates
            and self.network == other.network
            and self.grid_device == other.grid_device
            and self.grid_network == other.grid_network
            and dict(self.provenance) == dict(other.provenance)
        )

    __hash__ = None


def _check_finite(name: str, value, low: float, strict: bool = False) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamsError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ParamsError(f"{name} must be finite, got {value}")
    if strict and value <= low:
        raise ParamsError(f"{name} = {value} must be > {low}")
    if not strict and value < low:
        raise ParamsError(f"{name} = {value} must be >= {low}")


def bitrate_for(params: ModelParams, device: DeviceKind, chosen: Resolution) -> float:
    """Bitrate in GB/h for streaming on ``device`` at ``chosen`` resolution.

    ``automatic`` and ``unknown`` fall back to the device's native resolution.
    """
    res = effective_resolution(params, device, chosen)
    try:
        return params.bitrates[res]
    except KeyError:
        raise ParamsError(f"no bitrate configured for resolution {res} (bitrates.{res})") from None


def effective_resolution(params: ModelParams, device: DeviceKind, chosen: Resolution) -> Resolution:
    if chosen.is_concrete:
        return chosen
    return params.devices[device].native_resolution


# -- defaults -----------------------------------------------------------------

# (embodied kg CO2-eq, lifetime years, load W, native resolution)
_DEVICE_TABLE = {
    DeviceKind.SMARTPHONE: (44.0, 3.0, 6.0, Resolution.R360P),
    DeviceKind.TABLET: (138.0, 3.0, 7.0, Resolution.R480P),
    DeviceKind.LAPTOP_PC: (250.0, 6.0, 32.0, Resolution.R720P),
    DeviceKind.SMART_TV: (1000.0, 8.0, 200.0, Resolution.R1080P),
}

# overall daily use time, back-solved from the per-hour device production
# intensities (E / (L * 365 * intensity)); the smartphone value is solved from
# its 36 % traffic share of per-hour GWP instead, see _USE_HOURS_SOURCE
_DAILY_USE_HOURS = {
    DeviceKind.SMARTPHONE: 2.27,
    DeviceKind.TABLET: 0.60,
    DeviceKind.LAPTOP_PC: 1.27,
    DeviceKind.SMART_TV: 2.14,
}

_USE_HOURS_SOURCE = {
    DeviceKind.SMARTPHONE: "derived: traffic is 36 % of smartphone GWP per hour",
    DeviceKind.TABLET: "derived: 138/(3*365*0.21) from the published per-hour production cell",
    DeviceKind.LAPTOP_PC: "derived: 250/(6*365*0.09) from the published per-hour production cell",
    DeviceKind.SMART_TV: "derived: 1000/(8*365*0.16) from the published per-hour production cell",
}

_BITRATES = {
    Resolution.R360P: 0.3,
    Resolution.R480P: 0.45,
    Resolution.R720P: 1.2,
    Resolution.R1080P: 1.8,
}


def default_params() -> ModelParams:
    """The reference parameter set (German device grid, EU-28 network grid)."""
    provenance = {}
    devices = {}
    for kind, (embodied, lifetime, watts, native) in _DEVICE_TABLE.items():
        devices[kind] = DeviceProfile(
            kind=kind,
            embodied_kg=embodied,
            lifetime_years=lifetime,
            power_watts=watts,
            native_resolution=native,
            daily_use_hours=_DAILY_USE_HOURS[kind],
        )
        for name in ("embodied_kg", "lifetime_years", "power_watts"):
            provenance[f"devices.{kind}.{name}"] = "published: device inventory"
        provenance[f"devices.{kind}.native_resolution"] = "published: resolution and bitrate table"
        provenance[f"devices.{kind}.daily_use_hours"] = _USE_HOURS_SOURCE[kind]
    for res in _BITRATES:
        provenance[f"bitrates.{res}"] = "published: resolution and bitrate table"
    for name in ("access_kwh_per_gb", "core_edge_kwh_per_gb", "datacenter_kwh_per_gb"):
        provenance[f"network.{name}"] = "published: network energy intensities"
    provenance["grid_device.kg_per_kwh"] = (
        "derived: laptop/TV electricity cells, 0.02/0.032 and 0.12/0.2"
    )
    provenance["grid_network.kg_per_kwh"] = (
        "derived: mean traffic cell / (bitrate * 0.073)"
    )
    return ModelParams(
        devices=devices,
        bitrates=BitrateTable(dict(_BITRATES)),
        network=NetworkIntensity(0.004, 0.02, 0.049),
        grid_device=GridIntensity("DE", 0.62),
        grid_network=GridIntensity("EU-28", 0.55),
        provenance=provenance,
    )


# -- (de)serialization ---------------------------------------------------------

_DEVICE_FIELDS = ("embodied_kg", "lifetime_years", "power_watts", "native_resolution", "daily_use_hours")
_NETWORK_FIELDS = ("access_kwh_per_gb", "core_edge_kwh_per_gb", "datacenter_kwh_per_gb")
_GRID_FIELDS = ("region_label", "kg_per_kwh")
_TOP_FIELDS = ("devices", "bitrates", "network", "grid_device", "grid_network", "provenance")


def params_to_dict(params: ModelParams) -> dict:
    return {
        "devices": {
            str(kind): {
                "embodied_kg": p.embodied_kg,
                "lifetime_years": p.lifetime_years,
                "power_watts": p.power_watts,
                "native_resolution": str(p.native_resolution),
                "daily_use_hours": p.daily_use_hours,
            }
            for kind, p in params.devices.items()
        },
        "bitrates": {str(res): rate for res, rate in params.bitrates.rates.items()},
        "network": {name: getattr(params.network, name) for name in _NETWORK_FIELDS},
        "grid_device": {
            "region_label": params.grid_device.region_label,
            "kg_per_kwh": params.grid_device.kg_per_kwh,
        },
        "grid_network": {
            "region_label": params.grid_network.region_label,
            "kg_per_kwh": params.grid_network.kg_per_kwh,
        },
        "provenance": dict(params.provenance),
    }


def _section(data: Any, name: str, allowed: tuple[str, ...] | None, required: bool = True) -> dict:
    if not isinstance(data, dict):
        raise ParamsError(f"{name} must be a mapping, got {type(data).__name__}")
    if allowed is not None:
        unknown = sorted(set(map(str, data)) - set(allowed))
        if unknown:
            raise ParamsError(f"unknown field(s) in {name}: {', '.join(unknown)}")
        if required:
            absent = [k for k in allowed if k not in data]
            if absent:
                raise ParamsError(f"missing field(s) in {name}: {', '.join(absent)}")
    return data


def _number(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParamsError(f"{name} must be a number, got {value!r}")
    return float(value)


def params_from_dict(data: Any) -> ModelParams:
    """Build and validate a :class:`ModelParams` from plain nested mappings."""
    top = _section(data, "parameter file", None)
    unknown = sorted(set(map(str, top)) - set(_TOP_FIELDS))
    if unknown:
        raise ParamsError(f"unknown field(s) in parameter file: {', '.join(unknown)}")
    for name in _TOP_FIELDS[:-1]:
        if name not in top:
            raise ParamsError(f"missing section {name!r}")

    devices_raw = _section(top["devices"], "devices", None)
    devices = {}
    for key, body in devices_raw.items():
        kind = parse_device(key)
        body = _section(body, f"devices.{kind}", _DEVICE_FIELDS)
        devices[kind] = DeviceProfile(
            kind=kind,
            embodied_kg=_number(f"devices.{kind}.embodied_kg", body["embodied_kg"]),
            lifetime_years=_number(f"devices.{kind}.lifetime_years", body["lifetime_years"]),
            power_watts=_number(f"devices.{kind}.power_watts", body["power_watts"]),
            native_resolution=parse_resolution(body["native_resolution"]),
            daily_use_hours=_number(f"devices.{kind}.daily_use_hours", body["daily_use_hours"]),
        )

    rates = {}
    for key, value in _section(top["bitrates"], "bitrates", None).items():
        res = parse_resolution(key)
        rates[res] = _number(f"bitrates.{res}", value)

    net = _section(top["network"], "network", _NETWORK_FIELDS)
    grids = {}
    for name in ("grid_device", "grid_network"):
        body = _section(top[name], name, _GRID_FIELDS)
        grids[name] = GridIntensity(str(body["region_label"]), _number(f"{name}.kg_per_kwh", body["kg_per_kwh"]))

    provenance = top.get("provenance") or {}
    if not isinstance(provenance, dict):
        raise ParamsError("provenance must be a mapping of parameter path to source text")

    return ModelParams(
        devices=devices,
        bitrates=BitrateTable(rates),
        network=NetworkIntensity(*(_number(f"network.{n}", net[n]) for n in _NETWORK_FIELDS)),
        grid_device=grids["grid_device"],
        grid_network=grids["grid_network"],
        provenance={str(k): str(v) for k, v in provenance.items()},
    )


def dump_params(params: ModelParams) -> str:
    return yaml.safe_dump(params_to_dict(params), sort_keys=False, allow_unicode=True)


def save_params(params: ModelParams, path) -> None:
    Path(path).write_text(dump_params(params), encoding="utf-8")


def load_params(path) -> ModelParams:
    """Read a YAML parameter file.

    Raises:
        ParamsError: on malformed YAML, unknown or missing fields, or any
            violated parameter invariant.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParamsError(f"cannot parse parameter file {path}: {exc}") from None
    return params_from_dict(data)


# -- dotted-path access ----------------------------------------------------------


def leaf_paths(params: ModelParams) -> list[str]:
    """All numeric leaf paths, e.g. ``devices.smart_tv.embodied_kg``."""
    paths = []
    for path, value in _walk(params_to_dict(params)):
        if path.startswith("provenance.") or not isinstance(value, (int, float)):
            continue
        paths.append(path)
    return paths


def _walk(node, prefix=""):
    if isinstance(node, dict):
        for key, value in node.items():
            if prefix == "provenance.":
                yield prefix + str(key), value
                continue
            yield from _walk(value, f"{prefix}{key}.")
    else:
        yield prefix[:-1], node


def get_value(params: ModelParams, path: str):
    node: Any = params_to_dict(params)
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ParamsError(f"unknown parameter path {path!r}")
        node = node[part]
    if isinstance(node, dict):
        raise ParamsError(f"parameter path {path!r} is a section, not a value")
    return node


def with_overrides(params: ModelParams, overrides: Mapping[str, Any]) -> ModelParams:
    """Copy of ``params`` with dotted-path leaves replaced and revalidated."""
    if not overrides:
        return params
    data = params_to_dict(params)
    for path, value in overrides.items():
        parts = path.split(".")
        if parts[0] == "provenance":
            raise ParamsError(f"provenance is not overridable ({path!r})")
        node = data
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise ParamsError(f"unknown parameter path {path!r}")
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node or isinstance(node[parts[-1]], dict):
            raise ParamsError(f"unknown parameter path {path!r}")
        node[parts[-1]] = value
        data["provenance"][path] = "override"
    return params_from_dict(data)

