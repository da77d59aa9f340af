"""Command-line interface: ``streamfootprint <command> ...``.

Exit codes: 0 success (validation warnings are printed but do not fail the
run), 1 invalid input, parameters or model error, 2 command-line usage
error. With ``--strict`` validation warnings also exit 1.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import yaml

from . import __version__
from . import analysis as A
from . import params as P
from . import reports as R
from . import scenarios as S
from .diary import (DaytimeSlot, DiaryError, STREAMING_PLATFORMS, parse_dataset, weekly_hours)
from .engine import (Components, annual_budget_share, annualize, cohort_footprints, intensity_table)
from .fixtures import synth_average_participant
from .params import DEVICE_ORDER

AXIS_GROUPS = {
    "device": list(DEVICE_ORDER),
    "platform": list(STREAMING_PLATFORMS),
    "day": list(range(1, 8)),
    "slot": list(DaytimeSlot),
    "platform_device": [(p, d) for p in STREAMING_PLATFORMS for d in DEVICE_ORDER],
}

FIGURES = (
    ("chart_platform_device", "platform_device", "GWP of average streaming per platform and device"),
    ("chart_platform", "platform", "GWP of average streaming per platform"),
    ("chart_device", "device", "GWP of average streaming per device"),
)


class UsageError(Exception):
    pass


# -- argument parsing -------------------------------------------------------------------


def _parse_assignment(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected PATH=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamfootprint",
        description="Greenhouse-gas footprint of online video streaming from usage diaries.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    params_opts = argparse.ArgumentParser(add_help=False)
    params_opts.add_argument("--params", help="YAML parameter file (default: built-in parameters)")
    params_opts.add_argument("--set", action="append", default=[], type=_parse_assignment,
                             metavar="PATH=VALUE",
                             help="override one parameter, e.g. grid_device.kg_per_kwh=0")

    out_opts = argparse.ArgumentParser(add_help=False)
    out_opts.add_argument("--out-dir", help="write .csv/.json reports (and charts) here")
    out_opts.add_argument("--format", choices=("table", "delimited"), default="table",
                          help="stdout format")

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("diary", nargs="?", help="diary CSV file")
    data_opts.add_argument("profiles", nargs="?", help="participant profile CSV file")
    data_opts.add_argument("--average", action="store_true",
                           help="use the built-in average-participant week instead of files")
    data_opts.add_argument("--strict", action="store_true", help="treat validation warnings as errors")

    viewer_opts = argparse.ArgumentParser(add_help=False)
    viewer_opts.add_argument("--per-viewer", action="store_true",
                             help="divide emissions by audience size (not the reference model)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[data_opts], help="parse and validate diary files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("footprint", parents=[data_opts, params_opts, out_opts, viewer_opts],
                       help="weekly footprint breakdowns")
    p.add_argument("--scenario", help="scenario file or built-in scenario name")
    p.add_argument("--by", choices=tuple(AXIS_GROUPS), default="device")
    p.add_argument("--no-charts", action="store_true", help="skip SVG charts in --out-dir")
    p.set_defaults(func=cmd_footprint)

    p = sub.add_parser("intensity", parents=[params_opts, out_opts],
                       help="per-hour GWP intensity per device")
    p.set_defaults(func=cmd_intensity)

    p = sub.add_parser("analyze", parents=[data_opts, params_opts, out_opts],
                       help="descriptives, weekend t-test and determinant regressions")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scenario", parents=[data_opts, params_opts, out_opts, viewer_opts],
                       help="compare a scenario against the baseline")
    p.add_argument("--scenario", required=True, help="scenario file or built-in scenario name")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("mc", parents=[data_opts, params_opts, out_opts, viewer_opts],
                       help="seeded Monte Carlo over parameter distributions")
    p.add_argument("--participant")
    p.add_argument("--config", help="YAML Monte Carlo config")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--dist", action="append", default=[], type=_parse_assignment,
                   metavar="PATH=SPEC", help="uniform:LOW:HIGH or triangular:LOW:MODE:HIGH")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("tornado", parents=[data_opts, params_opts, out_opts, viewer_opts],
                       help="one-at-a-time sensitivity of the weekly total")
    p.add_argument("--participant")
    p.add_argument("--range", action="append", default=[], type=_parse_assignment,
                   metavar="PATH=PCT", help="+-percent range for one parameter")
    p.set_defaults(func=cmd_tornado)
    return parser


# -- shared helpers ----------------------------------------------------------------------


def _load_data(args):
    if args.average:
        if args.diary or args.profiles:
            raise UsageError("--average cannot be combined with diary files")
        return synth_average_participant(), []
    if not (args.diary and args.profiles):
        raise UsageError("need DIARY and PROFILES files (or --average)")
    return parse_dataset(args.diary, args.profiles), [args.diary, args.profiles]


def _load_params(args):
    params = P.load_params(args.params) if args.params else P.default_params()
    if args.set:
        overrides = {k: yaml.safe_load(v) for k, v in args.set}
        params = P.with_overrides(params, overrides)
    inputs = [args.params] if args.params else []
    return params, inputs


def _load_scenario(ref: str):
    builtin = S.builtin_scenarios()
    if ref in builtin and not Path(ref).exists():
        return builtin[ref], None
    return S.load_scenario(ref), ref


def _argv_for_manifest(argv):
    # output location does not change report content
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out-dir":
            skip = True
            continue
        if a.startswith("--out-dir="):
            continue
        out.append(a)
    return out


def _warnings(ds, args) -> int:
    for w in ds.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if ds.warnings and getattr(args, "strict", False):
        print(f"error: {len(ds.warnings)} warning(s) with --strict", file=sys.stderr)
        return 1
    return 0


def _emit(tables, args, manifest, extra_writer=None) -> None:
    for t in tables:
        if args.format == "delimited":
            sys.stdout.write(R.render_delimited(t, manifest))
        else:
            sys.stdout.write(R.render_text(t))
        sys.stdout.write("\n")
    if args.out_dir:
        for t in tables:
            R.write_table(t, args.out_dir, manifest)
        if extra_writer is not None:
            extra_writer(Path(args.out_dir))


def _label(group) -> str:
    if isinstance(group, tuple):
        return "/".join(str(g) for g in group)
    return str(group)


def _mean_components(breakdowns, axis):
    n = len(breakdowns)
    result = {}
    groups = AXIS_GROUPS[axis]
    per = [_groups(b, axis) for b in breakdowns]
    for g in groups:
        cs = [p.get(g, Components()) for p in per]
        total = Components.fsum(cs)
        result[g] = Components(total.production_kg / n, total.operation_kg / n,
                               total.traffic_kg / n, total.hours / n) if n else Components()
    return result


def _groups(breakdown, axis):
    if axis == "platform_device":
        return breakdown.by_platform_device()
    return breakdown.marginal(axis)


def _component_row(c: Components):
    return [c.hours, c.production_kg, c.operation_kg, c.traffic_kg, c.total_kg]


COMPONENT_COLUMNS = ["hours", "production_kg", "operation_kg", "traffic_kg", "total_kg"]


def _axis_columns(axis):
    return ["platform", "device"] if axis == "platform_device" else [axis]


def _group_cells(group):
    return [str(g) for g in group] if isinstance(group, tuple) else [str(group)]


# -- commands -------------------------------------------------------------------------


def cmd_validate(args, argv) -> int:
    ds, _ = _load_data(args)
    status = _warnings(ds, args)
    state = "with warnings" if ds.warnings else "clean"
    print(f"ok ({state}): {len(ds.participants)} participant(s), {len(ds.entries)} entries, "
          f"{len(ds.warnings)} warning(s)")
    return status


def footprint_tables(breakdowns: dict, axis: str) -> list:
    pids = sorted(breakdowns)
    per = R.Table(
        name=f"footprint_by_{axis}",
        title=f"Weekly footprint per participant by {axis} [kg CO2-eq.]",
        columns=["participant", *_axis_columns(axis), *COMPONENT_COLUMNS],
    )
    for pid in pids:
        groups = _groups(breakdowns[pid], axis)
        for g in AXIS_GROUPS[axis]:
            per.rows.append([pid, *_group_cells(g), *_component_row(groups.get(g, Components()))])
    mean = R.Table(
        name=f"footprint_by_{axis}_mean",
        title=f"Cohort-mean weekly footprint by {axis} [kg CO2-eq.] (n = {len(pids)})",
        columns=[*_axis_columns(axis), *COMPONENT_COLUMNS],
    )
    for g, c in _mean_components([breakdowns[p] for p in pids], axis).items():
        mean.rows.append([*_group_cells(g), *_component_row(c)])
    return [per, mean]


def summary_table(breakdowns: dict) -> R.Table:
    t = R.Table(
        name="footprint_summary",
        title="Weekly footprint totals",
        columns=["participant", *COMPONENT_COLUMNS, "annual_kg", "budget_share"],
    )
    totals = []
    for pid in sorted(breakdowns):
        g = breakdowns[pid].grand
        totals.append(g)
        t.rows.append([pid, *_component_row(g), annualize(g.total_kg), annual_budget_share(g.total_kg)])
    if totals:
        n = len(totals)
        s = Components.fsum(totals)
        m = Components(s.production_kg / n, s.operation_kg / n, s.traffic_kg / n, s.hours / n)
        t.rows.append(["cohort_mean", *_component_row(m), annualize(m.total_kg),
                       annual_budget_share(m.total_kg)])
    t.notes.append("budget_share: annual footprint / 1609 kg per-capita CO2 budget")
    return t


def cmd_footprint(args, argv) -> int:
    ds, inputs = _load_data(args)
    params, p_inputs = _load_params(args)
    status = _warnings(ds, args)
    if status:
        return status
    scen_inputs = []
    if args.scenario:
        spec, path = _load_scenario(args.scenario)
        params, ds = S.apply_scenario(spec, params, ds)
        scen_inputs = [path] if path else []
    breakdowns = cohort_footprints(params, ds, args.per_viewer)
    manifest = R.make_manifest(P.dump_params(params), inputs + p_inputs + scen_inputs, None,
                               _argv_for_manifest(argv))

    by_tables = footprint_tables(breakdowns, args.by)
    tables = [by_tables[1], summary_table(breakdowns)]
    if args.per_viewer:
        for t in tables:
            t.notes.append("per-viewer mode: emissions divided by audience size")

    def extra(out_dir: Path):
        R.write_table(by_tables[0], out_dir, manifest)
        for name, axis, title in FIGURES:
            per, mean = footprint_tables(breakdowns, axis)
            mean.name = name
            R.write_table(mean, out_dir, manifest)
            if args.no_charts or not breakdowns:
                continue
            labels = [_label(g) for g in AXIS_GROUPS[axis]]
            col = {c: i for i, c in enumerate(mean.columns)}
            stacks = {
                "device production": [r[col["production_kg"]] for r in mean.rows],
                "electricity use": [r[col["operation_kg"]] for r in mean.rows],
                "data traffic": [r[col["traffic_kg"]] for r in mean.rows],
            }
            hours = [r[col["hours"]] for r in mean.rows]
            R.write_bar_chart(out_dir / f"{name}.svg", title, labels, stacks, hours, manifest)

    _emit(tables, args, manifest, extra)
    return 0


def intensity_report(params) -> R.Table:
    rows = intensity_table(params)
    t = R.Table(
        name="intensity",
        title="GWP intensity per hour of streaming at native resolution [kg CO2-eq./h]",
        columns=["component", *[str(r.device) for r in rows]],
    )
    t.rows.append(["device", *[r.production_kg_per_h for r in rows]])
    t.rows.append(["electricity_use", *[r.electricity_kg_per_h for r in rows]])
    t.rows.append(["data_traffic", *[r.traffic_kg_per_h for r in rows]])
    t.rows.append(["sum", *[r.total_kg_per_h for r in rows]])
    return t


def cmd_intensity(args, argv) -> int:
    params, inputs = _load_params(args)
    manifest = R.make_manifest(P.dump_params(params), inputs, None, _argv_for_manifest(argv))
    _emit([intensity_report(params)], args, manifest)
    return 0


def analysis_tables(ds, params) -> list:
    tables = []
    dev = R.Table("descriptives_device_hours", "Weekly hours of streaming per device",
                  ["device", "n", "mean", "sd", "min", "max"])
    for d, s in A.device_hours_table(ds).items():
        dev.rows.append([str(d), s.n, s.mean, s.sd, s.min, s.max])
    tables.append(dev)

    daily = R.Table("descriptives_daily_hours", "Mean daily streaming hours (overall and per slot)",
                    ["measure", "n", "mean", "sd", "min", "max"])
    pids = sorted(ds.participant_ids)
    s = A.daily_hours_stats(ds)
    daily.rows.append(["daily_total", s.n, s.mean, s.sd, s.min, s.max])
    for slot in DaytimeSlot:
        vals = []
        for pid in pids:
            vals.append(math.fsum(e.hours for e in ds.entries_for(pid)
                                  if e.platform.in_model and e.slot is slot) / 7.0)
        s = A.describe(vals)
        daily.rows.append([f"slot_{slot}", s.n, s.mean, s.sd, s.min, s.max])
    tables.append(daily)

    tt = R.Table("ttest_weekend_weekday", "Paired t-test: mean daily hours, weekend vs weekday",
                 ["weekend_mean", "weekday_mean", "t", "df", "p", "cohens_d", "marker"])
    try:
        wk = A.weekend_vs_weekday(ds)
        res = wk.test
        tt.rows.append([A.describe(wk.weekend).mean, A.describe(wk.weekday).mean, res.t_value,
                        res.df, res.p_value, res.cohens_d, A.significance_marker(res.p_value)])
    except A.AnalysisError as exc:
        tt.notes.append(f"refused: {exc}")
    tables.append(tt)

    totals = {pid: b.total_kg for pid, b in cohort_footprints(params, ds).items()}
    reg_tables = []
    for key, title in (("hours", "Predictors of daily streaming duration"),
                       ("gwp", "Predictors of weekly GHG emissions")):
        reg_tables.append(R.Table(f"regression_{key}", title,
                                  ["predictor", "b", "SD", "beta", "t", "p", "r", "r_marker"]))
    try:
        rep = A.determinants_report(ds, totals)
        for table, res in zip(reg_tables, (rep.hours, rep.gwp)):
            for c in res.coefficients:
                table.rows.append([c.name, c.b, c.se, c.beta, c.t, c.p, c.r,
                                   A.significance_marker(A.correlation_p(c.r, res.n))])
            table.notes.append(f"R^2 = {res.r_squared:.6f}; n = {res.n}; outcome: {res.outcome}")
            table.notes.append("SD is the standard error of b; beta is standardized")
            if rep.excluded:
                table.notes.append(f"excluded listwise: {len(rep.excluded)} participant(s)")
    except A.AnalysisError as exc:
        for table in reg_tables:
            table.notes.append(f"refused: {exc}")
    tables.extend(reg_tables)
    return tables


def cmd_analyze(args, argv) -> int:
    ds, inputs = _load_data(args)
    params, p_inputs = _load_params(args)
    status = _warnings(ds, args)
    if status:
        return status
    tables = analysis_tables(ds, params)
    for t in tables:
        for note in t.notes:
            if note.startswith("refused"):
                print(f"{t.name}: {note}", file=sys.stderr)
    manifest = R.make_manifest(P.dump_params(params), inputs + p_inputs, None, _argv_for_manifest(argv))
    _emit(tables, args, manifest)
    return 0


def scenario_tables(cmp: S.ScenarioComparison, spec: S.ScenarioSpec) -> list:
    pids = sorted(cmp.baseline)
    n = len(pids)

    def mean_grand(side):
        s = Components.fsum(side[p].grand for p in pids)
        return Components(s.production_kg / n, s.operation_kg / n, s.traffic_kg / n, s.hours / n) \
            if n else Components()

    base, scen = mean_grand(cmp.baseline), mean_grand(cmp.scenario)
    comp = R.Table("scenario_components",
                   f"Scenario '{spec.name}' vs baseline, cohort mean per week [kg CO2-eq.]",
                   ["component", "baseline_kg", "scenario_kg", "delta_kg", "relative_delta"])
    for name, attr in (("production", "production_kg"), ("operation", "operation_kg"),
                       ("traffic", "traffic_kg"), ("total", "total_kg")):
        b, s = getattr(base, attr), getattr(scen, attr)
        comp.rows.append([name, b, s, s - b, (s - b) / b if b else None])
    comp.rows.append(["hours", base.hours, scen.hours, scen.hours - base.hours,
                      (scen.hours - base.hours) / base.hours if base.hours else None])
    if cmp.substitution_intensity_ratio is not None:
        comp.notes.append(
            f"substituted hours: intensity ratio before/after = {cmp.substitution_intensity_ratio:.6f}")

    dev = R.Table("scenario_devices", "Per-device cohort mean, baseline vs scenario",
                  ["device", "baseline_hours", "baseline_kg", "baseline_kg_per_h",
                   "scenario_hours", "scenario_kg", "scenario_kg_per_h"])
    mb = _mean_components([cmp.baseline[p] for p in pids], "device") if n else {}
    ms = _mean_components([cmp.scenario[p] for p in pids], "device") if n else {}
    for d in DEVICE_ORDER:
        b, s = mb.get(d, Components()), ms.get(d, Components())
        dev.rows.append([str(d), b.hours, b.total_kg, b.total_kg / b.hours if b.hours else None,
                         s.hours, s.total_kg, s.total_kg / s.hours if s.hours else None])
    summary = R.Table("scenario_summary", "Scenario summary",
                      ["scenario", "baseline_total_kg", "scenario_total_kg", "delta_kg",
                       "substitution_intensity_ratio"])
    summary.rows.append([spec.name, base.total_kg, scen.total_kg, scen.total_kg - base.total_kg,
                         cmp.substitution_intensity_ratio])
    return [summary, comp, dev]


def cmd_scenario(args, argv) -> int:
    ds, inputs = _load_data(args)
    params, p_inputs = _load_params(args)
    status = _warnings(ds, args)
    if status:
        return status
    spec, path = _load_scenario(args.scenario)
    cmp = S.compare_scenario(spec, params, ds, args.per_viewer)
    manifest = R.make_manifest(P.dump_params(params), inputs + p_inputs + ([path] if path else []),
                               None, _argv_for_manifest(argv))
    _emit(scenario_tables(cmp, spec), args, manifest)
    return 0


def _participant(ds, requested):
    if requested:
        ds.participant(requested)
        return requested
    ids = sorted(ds.participant_ids)
    if len(ids) != 1:
        raise UsageError(f"dataset has {len(ids)} participants; choose one with --participant")
    return ids[0]


def cmd_mc(args, argv) -> int:
    ds, inputs = _load_data(args)
    params, p_inputs = _load_params(args)
    status = _warnings(ds, args)
    if status:
        return status
    pid = _participant(ds, args.participant)
    if args.config:
        cfg = S.mc_config_from_dict(yaml.safe_load(Path(args.config).read_text(encoding="utf-8")), params)
        inputs = inputs + [args.config]
    elif args.dist:
        cfg = S.McConfig(distributions={k: S.Distribution.parse(v) for k, v in args.dist})
    else:
        cfg = S.default_mc_config(params)
    cfg = S.McConfig(
        seed=args.seed if args.seed is not None else cfg.seed,
        n_samples=args.samples if args.samples is not None else cfg.n_samples,
        distributions=cfg.distributions,
    )
    summary = S.monte_carlo(params, ds, pid, cfg, args.per_viewer)
    manifest = R.make_manifest(P.dump_params(params), inputs + p_inputs, cfg.seed, _argv_for_manifest(argv))

    st = R.Table("mc_summary", f"Monte Carlo weekly total, participant {pid} [kg CO2-eq.]",
                 ["statistic", "value"])
    for name in ("baseline_total", "mean", "sd", "p5", "p50", "p95"):
        st.rows.append([name, getattr(summary, name)])
    st.rows.append(["n_samples", summary.n_samples])
    st.rows.append(["seed", summary.seed])
    st.notes.append("percentiles by nearest rank; PCG64 substream per sample")
    dt = R.Table("mc_distributions", "Sampled parameters", ["parameter", "kind", "low", "mode", "high"])
    for path in sorted(cfg.distributions):
        d = cfg.distributions[path]
        dt.rows.append([path, d.kind, d.low, d.mode, d.high])
    _emit([st, dt], args, manifest)
    return 0


def cmd_tornado(args, argv) -> int:
    ds, inputs = _load_data(args)
    params, p_inputs = _load_params(args)
    status = _warnings(ds, args)
    if status:
        return status
    pid = _participant(ds, args.participant)
    if args.range:
        ranges = {}
        for k, v in args.range:
            try:
                ranges[k] = float(v)
            except ValueError:
                raise UsageError(f"range for {k} is not a number: {v!r}") from None
    else:
        ranges = S.default_ranges(params)
    report = S.tornado(params, ds, pid, ranges, args.per_viewer)
    manifest = R.make_manifest(P.dump_params(params), inputs + p_inputs, None, _argv_for_manifest(argv))
    t = R.Table("tornado", f"One-at-a-time sensitivity, participant {pid} [kg CO2-eq./week]",
                ["parameter", "baseline_value", "low_value", "high_value", "low_total",
                 "high_total", "swing"])
    for r in report.rows:
        t.rows.append([r.parameter, float(r.baseline_value), r.low_value, r.high_value,
                       r.low_total, r.high_total, r.swing])
    t.notes.append(f"baseline total = {report.baseline_total:.6f}")
    _emit([t], args, manifest)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiaryError as exc:
        for message in exc.errors:
            print(f"error: {message}", file=sys.stderr)
        return 1
    except (P.ParamsError, S.ScenarioError, A.AnalysisError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
