"""Synthetic cohorts and an independent footprint oracle for the tests."""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import numpy as np

from streamfootprint.diary import (
    DaytimeSlot, DiaryEntry, ParticipantProfile, PlatformCategory, check_dataset,
)
from streamfootprint.engine import AXES, footprint_of_entries
from streamfootprint.params import DeviceKind, Resolution

DEVICES = tuple(DeviceKind)
SLOTS = tuple(DaytimeSlot)
PLATFORMS = tuple(PlatformCategory)


def random_entries(rng: np.random.Generator, participant: str, n: int, resolutions=None):
    """Up to ``n`` entries with distinct (day, slot, platform) keys."""
    keys = set()
    entries = []
    while len(entries) < n:
        key = (int(rng.integers(1, 8)), SLOTS[rng.integers(4)], PLATFORMS[rng.integers(5)])
        if key in keys:
            continue
        keys.add(key)
        day, slot, platform = key
        res = Resolution.AUTOMATIC
        if resolutions is not None and platform.in_model:
            res = resolutions[rng.integers(len(resolutions))]
        entries.append(DiaryEntry(
            participant, day, slot, platform, float(np.round(rng.uniform(0, 3), 2)),
            DEVICES[rng.integers(4)], int(rng.integers(1, 4)), res,
        ))
    return entries


def oracle_total(params, entries, per_viewer=False) -> Fraction:
    """Weekly total in exact arithmetic, written straight from the model equations."""
    rho = sum(Fraction(str(v)) for v in (params.network.access_kwh_per_gb,
                                          params.network.core_edge_kwh_per_gb,
                                          params.network.datacenter_kwh_per_gb))
    total = Fraction(0)
    for e in entries:
        if e.platform is PlatformCategory.BROADCAST_TV or e.device is None:
            continue
        dev = params.devices[e.device]
        res = e.resolution if e.resolution.is_concrete else dev.native_resolution
        h = Fraction(e.hours)
        prod = Fraction(dev.embodied_kg) / (Fraction(dev.lifetime_years) * 365 * Fraction(dev.daily_use_hours))
        op = Fraction(dev.power_watts) / 1000 * Fraction(params.grid_device.kg_per_kwh)
        tr = Fraction(params.bitrates[res]) * rho * Fraction(params.grid_network.kg_per_kwh)
        term = (prod + op + tr) * h
        if per_viewer:
            term /= e.audience
        total += term
    return total


PLANTED = {
    "digital_literacy": 0.4,
    "impact_knowledge": -0.3,
    "personal_norm": -0.5,
    "platform_membership": 0.8,
    "flatrate_size": 0.02,
    "age": -0.03,
    "education_level": 0.0,
    "income": 0.2,
    "gender": -0.25,
}


def synth_cohort(n: int, seed: int, planted=PLANTED, noise_sd: float = 0.1,
                 weekend_boost: float = 0.0, intercept: float = 6.5,
                 daily_sd: float = 0.0):
    """A cohort whose mean daily hours follow a linear model in the nine predictors.

    Each day's hours equal the participant's target (plus ``weekend_boost``
    on days 6 and 7, plus N(0, ``daily_sd``) day-to-day noise), split over a
    paid and a free platform entry.
    """
    rng = np.random.default_rng(seed)
    profiles, entries, targets = [], [], {}
    for i in range(n):
        pid = f"p{i:03d}"
        x = {
            "digital_literacy": float(np.round(rng.uniform(1, 5), 2)),
            "impact_knowledge": float(np.round(rng.uniform(1, 5), 2)),
            "personal_norm": float(np.round(rng.uniform(1, 5), 2)),
            "platform_membership": float(rng.integers(0, 2)),
            "flatrate_size": float(rng.choice([0, 2, 4, 8, 16])),
            "age": float(rng.integers(18, 70)),
            "education_level": float(rng.integers(1, 4)),
            "income": float(rng.integers(1, 4)),
            "gender": float(rng.integers(0, 2)),
        }
        target = intercept + sum(planted[k] * x[k] for k in planted) + rng.normal(0, noise_sd)
        target = float(np.clip(target, 0.2, 10.0))
        targets[pid] = target
        profiles.append(ParticipantProfile(
            participant_id=pid,
            age=x["age"],
            gender="female" if x["gender"] else "male",
            education_level=("primary", "secondary", "tertiary")[int(x["education_level"]) - 1],
            income_band=("low", "middle", "high")[int(x["income"]) - 1],
            employment="full_time",
            paid_membership=bool(x["platform_membership"]),
            mobile_flatrate_gb=x["flatrate_size"],
            digital_literacy=x["digital_literacy"],
            impact_knowledge=x["impact_knowledge"],
            personal_norm=x["personal_norm"],
            environmental_concern=3.0,
        ))
        paid_dev = DEVICES[rng.integers(4)]
        free_dev = DEVICES[rng.integers(4)]
        for day in range(1, 8):
            h = target + (weekend_boost if day >= 6 else 0.0)
            if daily_sd:
                h = float(np.clip(h + rng.normal(0, daily_sd), 0.0, 10.0))
            first = h * 0.6
            entries.append(DiaryEntry(pid, day, DaytimeSlot.EVENING, PlatformCategory.PAID_PLATFORM,
                                      first, paid_dev))
            entries.append(DiaryEntry(pid, day, DaytimeSlot.AFTERNOON, PlatformCategory.FREE_PLATFORM,
                                      h - first, free_dev))
    return check_dataset(profiles, entries), targets


def _rel_close(a: float, b: float, rel: float = 1e-12) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b)) or abs(a - b) <= 1e-300


def check_engine_properties(params, entries, scale: float, per_viewer: bool = False) -> None:
    """Assert linearity, additivity, marginal consistency and oracle equivalence."""
    base = footprint_of_entries(params, entries, "x", per_viewer)
    total = base.total_kg

    scaled = footprint_of_entries(
        params, [replace(e, hours=e.hours * scale) for e in entries], "x", per_viewer)
    assert _rel_close(scaled.total_kg, total * scale), (scaled.total_kg, total * scale)

    half = len(entries) // 2
    a = footprint_of_entries(params, entries[:half], "x", per_viewer)
    b = footprint_of_entries(params, entries[half:], "x", per_viewer)
    assert _rel_close(a.total_kg + b.total_kg, total), (a.total_kg + b.total_kg, total)

    grand = base.grand
    for axis in AXES + ("platform_device",):
        groups = base.by_platform_device() if axis == "platform_device" else base.marginal(axis)
        for attr in ("production_kg", "operation_kg", "traffic_kg", "hours"):
            s = sum(getattr(c, attr) for c in groups.values())
            assert _rel_close(s, getattr(grand, attr)), (axis, attr)

    if len(entries) <= 5:
        exact = float(oracle_total(params, entries, per_viewer))
        assert _rel_close(total, exact), (total, exact)


def _solve_exact(a, b):
    """Gauss-Jordan elimination over Fractions; ``a`` is square and nonsingular."""
    m = len(a)
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(m):
        pivot = next(r for r in range(col, m) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[-1] for row in aug]


def exact_ols(y, X):
    """Intercept-first coefficients, coefficient variances and R^2 from the
    normal equations in exact rational arithmetic."""
    n = len(y)
    rows = [[Fraction(1)] + [Fraction(float(v)) for v in row] for row in X]
    yy = [Fraction(float(v)) for v in y]
    k = len(rows[0])
    xtx = [[sum(r[i] * r[j] for r in rows) for j in range(k)] for i in range(k)]
    xty = [sum(r[i] * t for r, t in zip(rows, yy)) for i in range(k)]
    coef = _solve_exact(xtx, xty)
    resid = [t - sum(c * v for c, v in zip(coef, r)) for r, t in zip(rows, yy)]
    rss = sum(e * e for e in resid)
    mean = sum(yy) / n
    tss = sum((t - mean) ** 2 for t in yy)
    sigma2 = rss / (n - k)
    variances = []
    for j in range(k):
        unit = [Fraction(int(i == j)) for i in range(k)]
        variances.append(sigma2 * _solve_exact(xtx, unit)[j])
    return coef, variances, 1 - rss / tss


__all__ = ["check_engine_properties", "random_entries", "oracle_total", "synth_cohort", "PLANTED",
           "exact_ols"]
