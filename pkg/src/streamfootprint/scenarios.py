"""What-if scenarios, one-at-a-time sensitivity and seeded Monte Carlo.

A :class:`ScenarioSpec` combines sparse parameter overrides (dotted leaf
paths into :class:`~streamfootprint.params.ModelParams`) with behavior
levers applied to diary entries: device substitution, forced or default
resolution per platform, and per-platform duration scaling.

Monte Carlo sampling uses numpy's PCG64 generator. Sample ``i`` draws from
its own stream seeded by ``SeedSequence(seed, spawn_key=(i,))``, so results
do not depend on evaluation order or chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import yaml

from . import params as P
from .diary import DiaryDataset, PlatformCategory, check_dataset
from .engine import entry_components, footprint
from .params import DeviceKind, ModelParams, ParamsError, Resolution

DEFAULT_SEED = 20200113
DEFAULT_SAMPLES = 10_000


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    """A named bundle of parameter overrides and behavior changes.

    ``default_resolution`` replaces only ``automatic``/``unknown`` resolutions
    (a provider changing its default setting), while ``forced_resolution``
    replaces every entry's resolution on that platform.
    """

    name: str = "identity"
    description: str = ""
    param_overrides: Mapping[str, float] = field(default_factory=dict)
    device_substitution: Mapping[DeviceKind, DeviceKind] = field(default_factory=dict)
    forced_resolution: Mapping[PlatformCategory, Resolution] = field(default_factory=dict)
    default_resolution: Mapping[PlatformCategory, Resolution] = field(default_factory=dict)
    duration_scale: Mapping[PlatformCategory, float] = field(default_factory=dict)

    def __post_init__(self):
        for platform, factor in self.duration_scale.items():
            if not (isinstance(factor, (int, float)) and math.isfinite(factor) and factor >= 0):
                raise ScenarioError(f"duration_scale.{platform} must be a number >= 0, got {factor!r}")
        for table in (self.forced_resolution, self.default_resolution):
            for platform, res in table.items():
                if not res.is_concrete:
                    raise ScenarioError(f"resolution for {platform} must be concrete, got {res}")
        for platform in (*self.forced_resolution, *self.default_resolution, *self.duration_scale):
            if not platform.in_model:
                raise ScenarioError(f"{platform} is outside the footprint model")

    @property
    def is_identity(self) -> bool:
        return not (self.param_overrides or self.device_substitution or self.forced_resolution
                    or self.default_resolution or self.duration_scale)


def merge_scenarios(a: ScenarioSpec, b: ScenarioSpec, name: Optional[str] = None) -> ScenarioSpec:
    """Combine two scenarios; ``b`` wins where both set the same key."""
    return ScenarioSpec(
        name=name or f"{a.name}+{b.name}",
        param_overrides={**a.param_overrides, **b.param_overrides},
        device_substitution={**a.device_substitution, **b.device_substitution},
        forced_resolution={**a.forced_resolution, **b.forced_resolution},
        default_resolution={**a.default_resolution, **b.default_resolution},
        duration_scale={**a.duration_scale, **b.duration_scale},
    )


def apply_scenario(spec: ScenarioSpec, params: ModelParams, ds: DiaryDataset):
    """Return ``(params, dataset)`` transformed by ``spec``; inputs are untouched.

    Substituted devices keep the entry's resolution choice, so entries on
    ``automatic`` stream at the new device's native resolution.
    """
    if spec.is_identity:
        return params, ds
    try:
        new_params = P.with_overrides(params, spec.param_overrides)
    except ParamsError as exc:
        raise ScenarioError(f"scenario {spec.name!r}: {exc}") from None

    entries = []
    for e in ds.entries:
        if e.platform.in_model:
            changes = {}
            if e.device in spec.device_substitution:
                changes["device"] = spec.device_substitution[e.device]
            if e.platform in spec.forced_resolution:
                changes["resolution"] = spec.forced_resolution[e.platform]
            elif e.platform in spec.default_resolution and not e.resolution.is_concrete:
                changes["resolution"] = spec.default_resolution[e.platform]
            if e.platform in spec.duration_scale:
                changes["hours"] = e.hours * spec.duration_scale[e.platform]
            if changes:
                e = replace(e, **changes)
        entries.append(e)
    return new_params, check_dataset(ds.participants, entries)


@dataclass(frozen=True)
class ScenarioComparison:
    baseline: dict
    scenario: dict
    # kg/h of the substituted entries before / after; None without substitution
    substitution_intensity_ratio: Optional[float] = None


def compare_scenario(spec: ScenarioSpec, params: ModelParams, ds: DiaryDataset,
                     per_viewer: bool = False) -> ScenarioComparison:
    """Per-participant footprints before and after applying ``spec``."""
    new_params, new_ds = apply_scenario(spec, params, ds)
    ids = sorted(ds.participant_ids)
    baseline = {pid: footprint(params, ds, pid, per_viewer) for pid in ids}
    scenario = {pid: footprint(new_params, new_ds, pid, per_viewer) for pid in ids}

    ratio = None
    if spec.device_substitution:
        kg_b, h_b, kg_s, h_s = [], [], [], []
        for old, new in zip(ds.entries, new_ds.entries):
            if old.platform.in_model and old.device in spec.device_substitution and old.hours > 0:
                kg_b.append(entry_components(params, old, per_viewer).total_kg)
                h_b.append(old.hours)
                kg_s.append(entry_components(new_params, new, per_viewer).total_kg)
                h_s.append(new.hours)
        if h_b and math.fsum(kg_s) > 0 and math.fsum(h_s) > 0:
            ratio = (math.fsum(kg_b) / math.fsum(h_b)) / (math.fsum(kg_s) / math.fsum(h_s))
    return ScenarioComparison(baseline, scenario, ratio)


# -- scenario files ---------------------------------------------------------------------

_SCENARIO_KEYS = {"name", "description", "param_overrides", "behavior"}
_BEHAVIOR_KEYS = {"device_substitution", "forced_resolution", "default_resolution", "duration_scale"}


def _platform(text) -> PlatformCategory:
    try:
        return PlatformCategory(str(text))
    except ValueError:
        raise ScenarioError(f"unknown platform {text!r}") from None


def scenario_from_dict(data) -> ScenarioSpec:
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must contain a mapping")
    unknown = sorted(set(data) - _SCENARIO_KEYS)
    if unknown:
        raise ScenarioError(f"unknown scenario field(s): {', '.join(unknown)}")
    behavior = data.get("behavior") or {}
    unknown = sorted(set(behavior) - _BEHAVIOR_KEYS)
    if unknown:
        raise ScenarioError(f"unknown behavior field(s): {', '.join(unknown)}")
    try:
        subs = {P.parse_device(k): P.parse_device(v)
                for k, v in (behavior.get("device_substitution") or {}).items()}
        forced = {_platform(k): P.parse_resolution(v)
                  for k, v in (behavior.get("forced_resolution") or {}).items()}
        default = {_platform(k): P.parse_resolution(v)
                   for k, v in (behavior.get("default_resolution") or {}).items()}
    except ParamsError as exc:
        raise ScenarioError(str(exc)) from None
    scale = {_platform(k): v for k, v in (behavior.get("duration_scale") or {}).items()}
    overrides = dict(data.get("param_overrides") or {})
    return ScenarioSpec(
        name=str(data.get("name", "scenario")),
        description=str(data.get("description", "")),
        param_overrides=overrides,
        device_substitution=subs,
        forced_resolution=forced,
        default_resolution=default,
        duration_scale=scale,
    )


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    behavior = {
        "device_substitution": {str(k): str(v) for k, v in spec.device_substitution.items()},
        "forced_resolution": {str(k): str(v) for k, v in spec.forced_resolution.items()},
        "default_resolution": {str(k): str(v) for k, v in spec.default_resolution.items()},
        "duration_scale": {str(k): v for k, v in spec.duration_scale.items()},
    }
    return {
        "name": spec.name,
        "description": spec.description,
        "param_overrides": dict(spec.param_overrides),
        "behavior": {k: v for k, v in behavior.items() if v},
    }


def load_scenario(path) -> ScenarioSpec:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ScenarioError(f"cannot parse scenario file {path}: {exc}") from None
    return scenario_from_dict(data)


def save_scenario(spec: ScenarioSpec, path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario_to_dict(spec), sort_keys=False), encoding="utf-8")


_BUILTIN_DIR = Path(__file__).parent / "data" / "scenarios"


def builtin_scenarios() -> dict[str, ScenarioSpec]:
    """Shipped example scenarios, keyed by file stem."""
    return {p.stem: load_scenario(p) for p in sorted(_BUILTIN_DIR.glob("*.yaml"))}


# -- one-at-a-time sensitivity ------------------------------------------------------------


def default_ranges(params: ModelParams) -> dict[str, float]:
    """Placeholder +-% ranges: 30 % on embodied emissions, 20 % on everything else."""
    ranges = {}
    for path in P.leaf_paths(params):
        if path.endswith(".lifetime_years"):
            continue
        ranges[path] = 30.0 if path.endswith(".embodied_kg") else 20.0
    return ranges


@dataclass(frozen=True)
class SensitivityRow:
    parameter: str
    baseline_value: float
    low_value: float
    high_value: float
    low_total: float
    high_total: float

    @property
    def swing(self) -> float:
        return abs(self.high_total - self.low_total)


@dataclass(frozen=True)
class SensitivityReport:
    baseline_total: float
    rows: tuple


def tornado(params: ModelParams, ds: DiaryDataset, participant: str,
            ranges: Mapping[str, float], per_viewer: bool = False) -> SensitivityReport:
    """Vary each parameter by +-pct with the rest at baseline; rank by swing."""
    if not ranges:
        raise ScenarioError("tornado needs at least one parameter range")
    baseline = footprint(params, ds, participant, per_viewer).total_kg
    rows = []
    for path in sorted(ranges):
        pct = ranges[path]
        if not (isinstance(pct, (int, float)) and math.isfinite(pct) and pct >= 0):
            raise ScenarioError(f"range for {path} must be a non-negative percentage, got {pct!r}")
        base_value = P.get_value(params, path)
        if not isinstance(base_value, (int, float)):
            raise ScenarioError(f"{path} is not a numeric parameter")
        lo = base_value * (1 - pct / 100.0)
        hi = base_value * (1 + pct / 100.0)
        totals = []
        for value in (lo, hi):
            try:
                varied = P.with_overrides(params, {path: value})
            except ParamsError as exc:
                raise ScenarioError(f"range +-{pct:g} % on {path} violates a parameter bound: {exc}") from None
            totals.append(footprint(varied, ds, participant, per_viewer).total_kg)
        rows.append(SensitivityRow(path, base_value, lo, hi, totals[0], totals[1]))
    rows.sort(key=lambda r: (-r.swing, r.parameter))
    return SensitivityReport(baseline, tuple(rows))


# -- Monte Carlo --------------------------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    """Uniform on [low, high] or triangular on [low, high] with peak ``mode``."""

    kind: str
    low: float
    high: float
    mode: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("uniform", "triangular"):
            raise ScenarioError(f"unknown distribution {self.kind!r}")
        if not (math.isfinite(self.low) and math.isfinite(self.high)) or self.low > self.high:
            raise ScenarioError(f"invalid bounds [{self.low}, {self.high}]")
        if self.kind == "triangular":
            if self.mode is None or not self.low <= self.mode <= self.high:
                raise ScenarioError(f"triangular mode {self.mode} outside [{self.low}, {self.high}]")

    def ppf(self, u):
        """Inverse CDF applied to uniform draws ``u`` in [0, 1)."""
        lo, hi = self.low, self.high
        if lo == hi:
            return np.full_like(u, lo)
        if self.kind == "uniform":
            return lo + (hi - lo) * u
        c = (self.mode - lo) / (hi - lo)
        left = lo + np.sqrt(u * (hi - lo) * (self.mode - lo))
        right = hi - np.sqrt((1 - u) * (hi - lo) * (hi - self.mode))
        return np.where(u < c, left, right)

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """``uniform:LOW:HIGH`` or ``triangular:LOW:MODE:HIGH``."""
        parts = text.split(":")
        try:
            if parts[0] == "uniform" and len(parts) == 3:
                return cls("uniform", float(parts[1]), float(parts[2]))
            if parts[0] == "triangular" and len(parts) == 4:
                return cls("triangular", float(parts[1]), float(parts[3]), float(parts[2]))
        except ValueError:
            pass
        raise ScenarioError(f"cannot parse distribution {text!r}")


@dataclass(frozen=True)
class McConfig:
    seed: int = DEFAULT_SEED
    n_samples: int = DEFAULT_SAMPLES
    distributions: Mapping[str, Distribution] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ScenarioError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n_samples < 1:
            raise ScenarioError(f"n_samples must be >= 1, got {self.n_samples}")


def relative_config(params: ModelParams, ranges: Mapping[str, float], seed: int = DEFAULT_SEED,
                    n_samples: int = DEFAULT_SAMPLES) -> McConfig:
    """Uniform +-pct distributions around the baseline values."""
    dists = {}
    for path, pct in ranges.items():
        v = P.get_value(params, path)
        dists[path] = Distribution("uniform", v * (1 - pct / 100.0), v * (1 + pct / 100.0))
    return McConfig(seed, n_samples, dists)


@dataclass(frozen=True)
class McSummary:
    baseline_total: float
    mean: float
    sd: float
    p5: float
    p50: float
    p95: float
    n_samples: int
    seed: int


def nearest_rank(sorted_values, pct: float) -> float:
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return float(sorted_values[rank - 1])


class _LinearEvaluator:
    """Weekly total as a closed-form function of the numeric parameter leaves.

    The footprint is linear in hours, so a diary collapses to hours per
    device and per (device, effective resolution). Parameter columns can then
    be evaluated for many samples at once.
    """

    def __init__(self, params: ModelParams, ds: DiaryDataset, participant: str, per_viewer: bool):
        self.params = params
        dev_hours = {}
        res_hours = {}
        for e in ds.entries_for(participant):
            if not e.platform.in_model or e.device is None:
                continue
            w = e.hours / e.audience if per_viewer else e.hours
            res = P.effective_resolution(params, e.device, e.resolution)
            dev_hours.setdefault(e.device, []).append(w)
            res_hours.setdefault(res, []).append(w)
        self.dev_hours = {d: math.fsum(v) for d, v in sorted(dev_hours.items(), key=lambda kv: kv[0].value)}
        self.res_hours = {r: math.fsum(v) for r, v in sorted(res_hours.items(), key=lambda kv: kv[0].value)}
        for r in self.res_hours:
            if r not in params.bitrates:
                raise ParamsError(f"no bitrate configured for resolution {r}")

    def totals(self, columns: Mapping[str, np.ndarray], size: int) -> np.ndarray:
        base = self.params

        def col(path, value):
            return columns[path] if path in columns else np.full(size, float(value))

        grid_dev = col("grid_device.kg_per_kwh", base.grid_device.kg_per_kwh)
        grid_net = col("grid_network.kg_per_kwh", base.grid_network.kg_per_kwh)
        net_paths = ("network.access_kwh_per_gb", "network.core_edge_kwh_per_gb",
                     "network.datacenter_kwh_per_gb")
        if any(p in columns for p in net_paths):
            rho = (col(net_paths[0], base.network.access_kwh_per_gb)
                   + col(net_paths[1], base.network.core_edge_kwh_per_gb)
                   + col(net_paths[2], base.network.datacenter_kwh_per_gb))
        else:
            rho = np.full(size, base.network.total())

        total = np.zeros(size)
        for d, h in self.dev_hours.items():
            prof = base.devices[d]
            pre = f"devices.{d.value}."
            prod = col(pre + "embodied_kg", prof.embodied_kg) / (
                col(pre + "lifetime_years", prof.lifetime_years) * P.DAYS_PER_YEAR
                * col(pre + "daily_use_hours", prof.daily_use_hours))
            op = col(pre + "power_watts", prof.power_watts) / 1000.0 * grid_dev
            total = total + (prod + op) * h
        traffic = np.zeros(size)
        for r, h in self.res_hours.items():
            traffic = traffic + col(f"bitrates.{r.value}", base.bitrates[r]) * h
        return total + traffic * rho * grid_net


def _check_distributions(params: ModelParams, cfg: McConfig) -> None:
    known = set(P.leaf_paths(params))
    for path, dist in cfg.distributions.items():
        if path not in known:
            raise ScenarioError(f"unknown parameter path {path!r}")
        for value in (dist.low, dist.high):
            try:
                P.with_overrides(params, {path: value})
            except ParamsError as exc:
                raise ScenarioError(f"distribution bounds for {path} violate a parameter bound: {exc}") from None
    # sampled bitrates must stay ordered whatever the draw
    lows, highs = {}, {}
    for res in P.RESOLUTION_ORDER:
        if res not in params.bitrates:
            continue
        d = cfg.distributions.get(f"bitrates.{res.value}")
        lows[res] = d.low if d else params.bitrates[res]
        highs[res] = d.high if d else params.bitrates[res]
    present = [r for r in P.RESOLUTION_ORDER if r in lows]
    for lo_res, hi_res in zip(present, present[1:]):
        if highs[lo_res] > lows[hi_res]:
            raise ScenarioError(
                f"bitrate distributions for {lo_res} and {hi_res} overlap; samples could break "
                f"monotonicity in resolution"
            )


def draw_uniforms(seed: int, n_samples: int, n_params: int) -> np.ndarray:
    """``(n_samples, n_params)`` uniforms, row ``i`` from substream ``(seed, i)``."""
    out = np.empty((n_samples, n_params))
    for i in range(n_samples):
        ss = np.random.SeedSequence(int(seed), spawn_key=(i,))
        out[i] = np.random.Generator(np.random.PCG64(ss)).random(n_params)
    return out


def monte_carlo(params: ModelParams, ds: DiaryDataset, participant: str, cfg: McConfig,
                per_viewer: bool = False) -> McSummary:
    """Sample parameter distributions and summarize the weekly total footprint.

    Parameters are drawn in sorted path order; percentiles use the
    nearest-rank definition.
    """
    _check_distributions(params, cfg)
    evaluator = _LinearEvaluator(params, ds, participant, per_viewer)
    paths = sorted(cfg.distributions)

    base_cols = {p: np.array([float(P.get_value(params, p))]) for p in paths}
    baseline = float(evaluator.totals(base_cols, 1)[0])

    u = draw_uniforms(cfg.seed, cfg.n_samples, len(paths))
    cols = {p: cfg.distributions[p].ppf(u[:, j]) for j, p in enumerate(paths)}
    totals = evaluator.totals(cols, cfg.n_samples)

    first = float(totals[0])
    # offsetting by the first sample keeps a constant sample's mean exact
    mean = first + math.fsum((totals - first).tolist()) / cfg.n_samples
    if cfg.n_samples > 1:
        sd = math.sqrt(math.fsum(((totals - mean) ** 2).tolist()) / (cfg.n_samples - 1))
    else:
        sd = 0.0
    ordered = np.sort(totals)
    return McSummary(
        baseline_total=baseline,
        mean=mean,
        sd=sd,
        p5=nearest_rank(ordered, 5),
        p50=nearest_rank(ordered, 50),
        p95=nearest_rank(ordered, 95),
        n_samples=cfg.n_samples,
        seed=int(cfg.seed),
    )


def mc_config_from_dict(data, params: ModelParams) -> McConfig:
    """Config mapping: ``seed``, ``n_samples`` and ``distributions`` of
    ``path: {kind, low, high[, mode]}`` or ``path: {relative_pct: X}``."""
    if not isinstance(data, dict):
        raise ScenarioError("Monte Carlo config must be a mapping")
    unknown = sorted(set(data) - {"seed", "n_samples", "distributions"})
    if unknown:
        raise ScenarioError(f"unknown Monte Carlo field(s): {', '.join(unknown)}")
    dists = {}
    for path, body in (data.get("distributions") or {}).items():
        if not isinstance(body, dict):
            raise ScenarioError(f"distribution for {path} must be a mapping")
        if "relative_pct" in body:
            v = P.get_value(params, path)
            pct = float(body["relative_pct"])
            dists[path] = Distribution("uniform", v * (1 - pct / 100), v * (1 + pct / 100))
        else:
            extra = sorted(set(body) - {"kind", "low", "high", "mode"})
            if extra:
                raise ScenarioError(f"unknown field(s) in distribution {path}: {', '.join(extra)}")
            try:
                dists[path] = Distribution(str(body["kind"]), float(body["low"]), float(body["high"]),
                                           None if body.get("mode") is None else float(body["mode"]))
            except KeyError as exc:
                raise ScenarioError(f"distribution {path} is missing {exc}") from None
    return McConfig(int(data.get("seed", DEFAULT_SEED)), int(data.get("n_samples", DEFAULT_SAMPLES)), dists)


def default_mc_config(params: ModelParams, seed: int = DEFAULT_SEED,
                      n_samples: int = DEFAULT_SAMPLES) -> McConfig:
    """Placeholder uncertainty: +-30 % embodied emissions, +-20 % intensities."""
    ranges = {}
    for path in P.leaf_paths(params):
        if path.endswith(".embodied_kg"):
            ranges[path] = 30.0
        elif path.startswith(("network.", "grid_")) or path.endswith(".power_watts"):
            ranges[path] = 20.0
    return relative_config(params, ranges, seed, n_samples)


__all__ = [
    "ScenarioError", "ScenarioSpec", "merge_scenarios", "apply_scenario", "ScenarioComparison",
    "compare_scenario", "load_scenario",
    "save_scenario", "scenario_from_dict", "scenario_to_dict", "builtin_scenarios",
    "default_ranges", "SensitivityRow", "SensitivityReport", "tornado", "Distribution",
    "McConfig", "relative_config", "McSummary", "monte_carlo", "mc_config_from_dict",
    "default_mc_config", "draw_uniforms", "nearest_rank", "DEFAULT_SEED",
]
