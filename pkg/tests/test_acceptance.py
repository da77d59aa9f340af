"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The summary lines also appear at the end of the pytest run.
"""

import csv
import io
import math
import time

import numpy as np
import pytest

from streamfootprint.analysis import ols
from streamfootprint.cli import main
from streamfootprint.diary import DaytimeSlot, DiaryEntry, PlatformCategory
from streamfootprint.engine import annual_budget_share, annualize, footprint, intensity_table
from streamfootprint.params import DeviceKind, Resolution, default_params, with_overrides
from streamfootprint.scenarios import Distribution, McConfig, monte_carlo
from streamfootprint.stats import t_cdf, t_two_sided_p

from synth import check_engine_properties, exact_ols

# published per-hour intensities, kg CO2-eq./h
PUBLISHED_INTENSITY = {
    "device": {"laptop_pc": 0.09, "smartphone": 0.02, "smart_tv": 0.16, "tablet": 0.21},
    "electricity_use": {"laptop_pc": 0.02, "smartphone": 0.004, "smart_tv": 0.12, "tablet": 0.003},
    "data_traffic": {"laptop_pc": 0.05, "smartphone": 0.01, "smart_tv": 0.07, "tablet": 0.02},
    "sum": {"laptop_pc": 0.15, "smartphone": 0.03, "smart_tv": 0.36, "tablet": 0.23},
}


def verdict(number, ok, text, record):
    record("measured", text)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {text}")
    return ok


def _csv_rows(text):
    lines = [line for line in text.splitlines() if line and not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


@pytest.mark.acceptance(1, "Per-hour intensity table within rounding tolerance, runtime < 1 s")
def test_criterion_1_intensity_table(capsys, record_property):
    start = time.perf_counter()
    code = main(["intensity", "--format", "delimited"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0
    rows = _csv_rows(out)
    header = rows[0]
    worst = 0.0
    failures = []
    for row in rows[1:]:
        component = row[0]
        for device, cell in zip(header[1:], row[1:]):
            published = PUBLISHED_INTENSITY[component][device]
            tol = 0.01 if published >= 0.05 else 0.005
            diff = abs(float(cell) - published)
            worst = max(worst, diff / tol)
            if diff > tol:
                failures.append(f"{component}/{device}: {cell} vs {published}")
    ok = not failures and elapsed < 1.0 and len(rows) == 5
    with capsys.disabled():
        verdict(1, ok, f"16 cells, worst |diff|/tol = {worst:.2f}, {elapsed * 1000:.0f} ms", record_property)
    assert not failures, failures
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "Smart TV / smartphone per-hour ratio in [10, 12]")
def test_criterion_2_device_factor(params, capsys, record_property):
    rows = {r.device: r.total_kg_per_h for r in intensity_table(params)}
    ratio = rows[DeviceKind.SMART_TV] / rows[DeviceKind.SMARTPHONE]
    ok = 10 <= ratio <= 12
    with capsys.disabled():
        verdict(2, ok, f"ratio = {ratio:.3f}", record_property)
    assert ok


@pytest.mark.acceptance(3, "Weekly total 2.0 kg +-10 %, 104 kg/yr +-10 %, budget share 6.5 % +-0.5 pp")
def test_criterion_3_weekly_total(params, avg, capsys, record_property):
    weekly = footprint(params, avg, "avg").total_kg
    annual = annualize(weekly)
    share = annual_budget_share(weekly)
    ok = (abs(weekly - 2.0) <= 0.2 and abs(annual - 104) <= 10.4 and abs(share - 0.065) <= 0.005)
    with capsys.disabled():
        verdict(3, ok, f"weekly {weekly:.4f} kg, annual {annual:.2f} kg, share {share * 100:.3f} %",
                record_property)
    assert ok


@pytest.mark.acceptance(4, "Per-device and per-platform totals and paid-platform traffic share")
def test_criterion_4_figure_cross_checks(params, avg, capsys, record_property):
    fp = footprint(params, avg, "avg")
    dev = fp.by_device
    plat = fp.by_platform
    checks = {
        "smart_tv": (dev[DeviceKind.SMART_TV].total_kg, 0.89),
        "smartphone": (dev[DeviceKind.SMARTPHONE].total_kg, 0.13),
        "paid": (plat[PlatformCategory.PAID_PLATFORM].total_kg, 1.07),
        "free": (plat[PlatformCategory.FREE_PLATFORM].total_kg, 0.44),
        "tv_station": (plat[PlatformCategory.TV_STATION_STREAM].total_kg, 0.39),
        "social": (plat[PlatformCategory.SOCIAL_MEDIA].total_kg, 0.1),
    }
    bad = [k for k, (got, want) in checks.items() if abs(got - want) > 0.15 * want]
    paid = plat[PlatformCategory.PAID_PLATFORM]
    traffic_share = paid.traffic_kg / paid.total_kg
    ok = not bad and abs(traffic_share - 0.22) <= 0.05
    text = ", ".join(f"{k} {got:.3f}" for k, (got, _) in checks.items())
    with capsys.disabled():
        verdict(4, ok, f"{text}, paid traffic share {traffic_share * 100:.1f} %", record_property)
    assert not bad, bad
    assert abs(traffic_share - 0.22) <= 0.05


@pytest.mark.acceptance(5, "Network intensity equals 0.073 kWh/GB exactly")
def test_criterion_5_network_intensity(params, capsys, record_property):
    rho = params.network.total()
    ok = rho == 0.073
    with capsys.disabled():
        verdict(5, ok, f"rho = {rho!r}", record_property)
    assert ok


def _random_case(rng):
    params = with_overrides(default_params(), {
        "grid_device.kg_per_kwh": float(rng.uniform(0, 1.2)),
        "grid_network.kg_per_kwh": float(rng.uniform(0, 1.2)),
        "devices.laptop_pc.embodied_kg": float(rng.uniform(50, 800)),
        "devices.smartphone.daily_use_hours": float(rng.uniform(0.5, 8)),
        "network.core_edge_kwh_per_gb": float(rng.uniform(0, 0.1)),
    })
    n = int(rng.integers(1, 6))
    keys = set()
    entries = []
    while len(entries) < n:
        key = (int(rng.integers(1, 8)), list(DaytimeSlot)[rng.integers(4)],
               list(PlatformCategory)[rng.integers(5)])
        if key in keys:
            continue
        keys.add(key)
        entries.append(DiaryEntry("x", key[0], key[1], key[2], float(rng.uniform(0, 6)),
                                  list(DeviceKind)[rng.integers(4)], int(rng.integers(1, 5)),
                                  list(Resolution)[rng.integers(6)]))
    return params, entries, float(rng.uniform(0, 5)), bool(rng.integers(2))


@pytest.mark.acceptance(6, "Engine properties on 1,000 randomized cases in < 10 s")
def test_criterion_6_engine_properties(capsys, record_property):
    rng = np.random.default_rng(20200113)
    start = time.perf_counter()
    for _ in range(1000):
        check_engine_properties(*_random_case(rng))
    elapsed = time.perf_counter() - start
    ok = elapsed < 10
    with capsys.disabled():
        verdict(6, ok, f"1000 cases, {elapsed:.2f} s", record_property)
    assert ok


@pytest.mark.acceptance(7, "OLS vs exact oracle (100 instances), t-distribution properties")
def test_criterion_7_statistics(capsys, record_property):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(6, 16))
        k = int(rng.integers(1, 5))
        X = np.round(rng.normal(0, 2, size=(n, k)), 3)
        beta = rng.choice([-1, 1], size=k) * rng.uniform(0.5, 3, size=k)
        y = np.round(1.5 + X @ beta + rng.normal(0, 1, size=n), 3)
        res = ols(y, X)
        coef, var, _ = exact_ols(y, X)
        got = [res.intercept] + [c.b for c in res.coefficients]
        se = [res.intercept_se] + [c.se for c in res.coefficients]
        for g, e in zip(got, coef):
            worst = max(worst, abs(g - float(e)) / abs(float(e)))
        for g, v in zip(se, var):
            e = math.sqrt(float(v))
            worst = max(worst, abs(g - e) / e)
    sym = max(abs(t_cdf(t, df) + t_cdf(-t, df) - 1)
              for t in np.linspace(-8, 8, 41) for df in (1, 2.5, 10, 90, 1000))
    p = t_two_sided_p(3.79, 90)
    ok = worst <= 1e-9 and t_cdf(0.0, 90) == 0.5 and sym <= 1e-12 and p < 0.001
    with capsys.disabled():
        verdict(7, ok, f"max rel err {worst:.1e}, symmetry err {sym:.1e}, p(3.79, 90) = {p:.2e}",
                record_property)
    assert worst <= 1e-9
    assert t_cdf(0.0, 90) == 0.5
    assert sym <= 1e-12
    assert p < 0.001


@pytest.mark.acceptance(8, "Byte-identical reruns; degenerate Monte Carlo mean equals baseline")
def test_criterion_8_determinism(tmp_path, params, avg, capsys, record_property):
    runs = []
    for i in range(2):
        out_dir = tmp_path / f"run{i}"
        for cmd in (["footprint", "--average", "--by", "platform_device"],
                    ["mc", "--average", "--samples", "2000", "--seed", "42"]):
            assert main([*cmd, "--format", "delimited", "--out-dir", str(out_dir)]) == 0
        stdout = capsys.readouterr().out
        files = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        runs.append((stdout, files))
    identical = runs[0] == runs[1]

    dists = {path: Distribution("uniform", v, v) for path, v in (
        ("devices.smart_tv.embodied_kg", 1000.0), ("devices.laptop_pc.power_watts", 32.0),
        ("grid_network.kg_per_kwh", 0.55), ("network.access_kwh_per_gb", 0.004))}
    mc = monte_carlo(params, avg, "avg", McConfig(99, 5000, dists))
    exact = mc.mean == mc.baseline_total
    ok = identical and exact
    with capsys.disabled():
        verdict(8, ok, f"{len(runs[0][1])} files identical: {identical}; "
                       f"degenerate mean {mc.mean!r} == baseline {mc.baseline_total!r}", record_property)
    assert identical
    assert exact
