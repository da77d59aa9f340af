"""Descriptive statistics, paired t-test, correlations and OLS regression.

Also assembles the cohort-level analyses: weekly hours per device,
weekend-versus-weekday streaming, and the two determinant regressions
(mean daily streaming hours and weekly GWP on nine participant covariates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .diary import DiaryDataset, ParticipantProfile, daily_hours, weekly_device_hours, weekly_hours
from .params import DEVICE_ORDER
from .stats import t_two_sided_p


class AnalysisError(ValueError):
    """Input cannot support the requested statistic."""


class RankDeficiencyError(AnalysisError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"design matrix is rank deficient: column {column!r} is linearly "
                         f"dependent on the preceding columns (or constant)")


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    sd: Optional[float]
    min: float
    max: float


def describe(values: Sequence[float]) -> DescriptiveStats:
    """Sample statistics; ``sd`` uses the n-1 denominator and is None for n = 1."""
    xs = [float(v) for v in values]
    if not xs:
        raise AnalysisError("describe() needs at least one value")
    n = len(xs)
    mean = math.fsum(xs) / n
    sd = None
    if n > 1:
        sd = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (n - 1))
    # guard mean against rounding just outside [min, max]
    lo, hi = min(xs), max(xs)
    return DescriptiveStats(n, min(max(mean, lo), hi), sd, lo, hi)


@dataclass(frozen=True)
class TTestResult:
    t_value: float
    df: int
    p_value: float
    cohens_d: float
    mean_difference: float


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Paired two-sided t-test of ``a - b``; effect size is mean(d)/sd(d)."""
    if len(a) != len(b):
        raise AnalysisError(f"paired samples differ in length ({len(a)} vs {len(b)})")
    n = len(a)
    if n < 2:
        raise AnalysisError("paired t-test needs at least 2 pairs")
    d = [float(x) - float(y) for x, y in zip(a, b)]
    stats = describe(d)
    if stats.sd == 0:
        raise AnalysisError("paired differences have zero variance; t is undefined")
    mean = math.fsum(d) / n
    t = mean / (stats.sd / math.sqrt(n))
    return TTestResult(t, n - 1, t_two_sided_p(t, n - 1), mean / stats.sd, mean)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise AnalysisError(f"samples differ in length ({len(x)} vs {len(y)})")
    if len(x) < 2:
        raise AnalysisError("correlation needs at least 2 observations")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise AnalysisError("correlation undefined for a constant variable")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_p(r: float, n: int) -> float:
    """Two-sided p-value of a Pearson correlation (t-test with n-2 df)."""
    if n < 3:
        return float("nan")
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return t_two_sided_p(t, n - 2)


def significance_marker(p: float) -> str:
    """``**`` for p < .001, ``*`` for p < .01, ``+`` for p < .05."""
    if p != p:
        return ""
    if p < 0.001:
        return "**"
    if p < 0.01:
        return "*"
    if p < 0.05:
        return "+"
    return ""


@dataclass(frozen=True)
class Coefficient:
    name: str
    b: float
    se: float
    beta: float
    t: float
    p: float
    r: float = float("nan")


@dataclass(frozen=True)
class RegressionResult:
    coefficients: tuple
    intercept: float
    intercept_se: float
    r_squared: float
    n: int
    outcome: str = "y"

    def __getitem__(self, name: str) -> Coefficient:
        for c in self.coefficients:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def df_resid(self) -> int:
        return self.n - len(self.coefficients) - 1


def ols(y: Sequence[float], X, labels: Optional[Sequence[str]] = None,
        outcome: str = "y") -> RegressionResult:
    """Multiple regression of ``y`` on the columns of ``X`` with an intercept.

    Coefficients come from a Householder QR factorization of the design
    matrix. Standardized coefficients are ``b * sd(x) / sd(y)``; t and p use
    ``n - k - 1`` degrees of freedom.

    Raises:
        AnalysisError: if there are too few rows or ``y`` is constant.
        RankDeficiencyError: naming the first column that is a linear
            combination of the intercept and earlier columns.
    """
    yv = np.asarray(y, dtype=float)
    Xm = np.asarray(X, dtype=float)
    if Xm.ndim == 1:
        Xm = Xm[:, None]
    n, k = Xm.shape
    if labels is None:
        labels = [f"x{j + 1}" for j in range(k)]
    labels = list(labels)
    if len(labels) != k:
        raise AnalysisError(f"{len(labels)} labels for {k} predictors")
    if yv.shape != (n,):
        raise AnalysisError(f"outcome has {yv.shape[0]} rows, predictors have {n}")
    if n <= k + 1:
        raise AnalysisError(f"need more than {k + 1} observations for {k} predictors, got {n}")

    design = np.column_stack([np.ones(n), Xm])
    names = ["(intercept)"] + labels
    q, r = np.linalg.qr(design, mode="reduced")
    col_norms = np.linalg.norm(design, axis=0)
    diag = np.abs(np.diag(r))
    for j in range(k + 1):
        if col_norms[j] == 0 or diag[j] <= 1e-10 * col_norms[j]:
            raise RankDeficiencyError(names[j])

    coef = solve_triangular(r, q.T @ yv)
    resid = yv - design @ coef
    rss = float(resid @ resid)
    y_centered = yv - yv.mean()
    tss = float(y_centered @ y_centered)
    if tss == 0:
        raise AnalysisError("outcome is constant; R^2 and standardized coefficients are undefined")
    df = n - k - 1
    sigma2 = rss / df
    r_inv = solve_triangular(r, np.eye(k + 1))
    se = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1))

    sd_y = math.sqrt(tss / (n - 1))
    coefficients = []
    for j in range(k):
        b = float(coef[j + 1])
        s = float(se[j + 1])
        xc = Xm[:, j] - Xm[:, j].mean()
        sd_x = math.sqrt(float(xc @ xc) / (n - 1))
        if s > 0:
            t = b / s
            p = t_two_sided_p(t, df)
        else:
            t = math.copysign(math.inf, b) if b != 0 else 0.0
            p = 0.0 if b != 0 else 1.0
        coefficients.append(Coefficient(labels[j], b, s, b * sd_x / sd_y, t, p))
    r2 = min(1.0, max(0.0, 1.0 - rss / tss))
    return RegressionResult(tuple(coefficients), float(coef[0]), float(se[0]), r2, n, outcome)


# -- cohort analyses --------------------------------------------------------------------

PREDICTORS = (
    "digital_literacy", "impact_knowledge", "personal_norm", "platform_membership",
    "flatrate_size", "age", "education_level", "income", "gender",
)

PREDICTOR_LABELS = {
    "digital_literacy": "Digital literacy",
    "impact_knowledge": "Impact knowledge",
    "personal_norm": "Personal norm",
    "platform_membership": "Platform membership",
    "flatrate_size": "Smartphone flat rate size",
    "age": "Age",
    "education_level": "Education level",
    "income": "Income",
    "gender": "Gender",
}

EDUCATION_CODES = {"primary": 1.0, "secondary": 2.0, "tertiary": 3.0}
INCOME_CODES = {"low": 1.0, "middle": 2.0, "high": 3.0}


@dataclass(frozen=True)
class Coding:
    """How categorical covariates become regression columns.

    ``unlimited_flatrate_factor`` times the largest finite plan in the data
    stands in for an unlimited mobile data plan. Gender is a female
    indicator; "other" rows are dropped when fewer than
    ``min_other_gender`` of them exist, otherwise they code as 0.
    """

    unlimited_flatrate_factor: float = 2.0
    min_other_gender: int = 2
    education: Optional[Mapping[str, float]] = None
    income: Optional[Mapping[str, float]] = None

    def education_code(self, level):
        return (self.education or EDUCATION_CODES).get(level) if level else None

    def income_code(self, band):
        return (self.income or INCOME_CODES).get(band) if band else None


def predictor_rows(profiles: Sequence[ParticipantProfile], coding: Coding = Coding()) -> dict:
    """Participant id -> tuple of the nine predictor values (None where missing)."""
    finite_plans = [p.mobile_flatrate_gb for p in profiles
                    if p.mobile_flatrate_gb is not None and math.isfinite(p.mobile_flatrate_gb)]
    unlimited = coding.unlimited_flatrate_factor * max(finite_plans) if finite_plans else None
    n_other = sum(1 for p in profiles if p.gender == "other")

    rows = {}
    for p in profiles:
        flat = p.mobile_flatrate_gb
        if flat is not None and math.isinf(flat):
            flat = unlimited
        if p.gender == "female":
            gender = 1.0
        elif p.gender == "male":
            gender = 0.0
        elif p.gender == "other" and n_other >= coding.min_other_gender:
            gender = 0.0
        else:
            gender = None
        membership = None if p.paid_membership is None else float(p.paid_membership)
        rows[p.participant_id] = (
            p.digital_literacy, p.impact_knowledge, p.personal_norm, membership, flat,
            p.age, coding.education_code(p.education_level), coding.income_code(p.income_band),
            gender,
        )
    return rows


@dataclass(frozen=True)
class DeterminantsReport:
    hours: RegressionResult
    gwp: RegressionResult
    excluded: tuple


def _regress_with_correlations(y, X, outcome) -> RegressionResult:
    labels = [PREDICTOR_LABELS[p] for p in PREDICTORS]
    res = ols(y, X, labels, outcome)
    Xa = np.asarray(X, dtype=float)
    coefs = []
    for j, c in enumerate(res.coefficients):
        try:
            r = pearson_r(Xa[:, j], y)
        except AnalysisError:
            r = float("nan")
        coefs.append(Coefficient(c.name, c.b, c.se, c.beta, c.t, c.p, r))
    return RegressionResult(tuple(coefs), res.intercept, res.intercept_se, res.r_squared,
                            res.n, res.outcome)


def determinants_report(ds: DiaryDataset, footprints: Mapping[str, float],
                        coding: Coding = Coding()) -> DeterminantsReport:
    """Regress mean daily streaming hours and weekly GWP on the nine predictors.

    Participants with any missing predictor (or no footprint) are removed
    listwise; their ids are returned in ``excluded``.
    """
    rows = predictor_rows(ds.participants, coding)
    X, hours, gwp, excluded = [], [], [], []
    for pid in sorted(rows):
        values = rows[pid]
        if any(v is None for v in values) or pid not in footprints:
            excluded.append(pid)
            continue
        X.append(values)
        hours.append(weekly_hours(ds, pid) / 7.0)
        gwp.append(float(footprints[pid]))
    if not X:
        raise AnalysisError("no participant has all nine predictors populated")
    return DeterminantsReport(
        hours=_regress_with_correlations(hours, X, "mean daily streaming hours"),
        gwp=_regress_with_correlations(gwp, X, "weekly GWP (kg CO2-eq.)"),
        excluded=tuple(excluded),
    )


@dataclass(frozen=True)
class WeekPattern:
    weekend: tuple
    weekday: tuple
    test: TTestResult


WEEKEND_DAYS = (6, 7)


def weekend_vs_weekday(ds: DiaryDataset) -> WeekPattern:
    """Paired t-test of mean daily streaming hours, weekend versus weekdays."""
    weekend, weekday = [], []
    for pid in sorted(ds.participant_ids):
        per_day = daily_hours(ds, pid)
        weekend.append(math.fsum(per_day[d] for d in WEEKEND_DAYS) / len(WEEKEND_DAYS))
        weekday.append(math.fsum(v for d, v in per_day.items() if d not in WEEKEND_DAYS) / 5.0)
    return WeekPattern(tuple(weekend), tuple(weekday), paired_ttest(weekend, weekday))


def device_hours_table(ds: DiaryDataset) -> dict:
    """Weekly hours per device across participants, as DescriptiveStats."""
    per_device = {d: [] for d in DEVICE_ORDER}
    for pid in sorted(ds.participant_ids):
        hours = weekly_device_hours(ds, pid)
        for d in DEVICE_ORDER:
            per_device[d].append(hours.get(d, 0.0))
    if not ds.participants:
        raise AnalysisError("dataset has no participants")
    return {d: describe(v) for d, v in per_device.items()}


def daily_hours_stats(ds: DiaryDataset) -> DescriptiveStats:
    if not ds.participants:
        raise AnalysisError("dataset has no participants")
    return describe([weekly_hours(ds, pid) / 7.0 for pid in sorted(ds.participant_ids)])


__all__ = [
    "AnalysisError", "RankDeficiencyError", "DescriptiveStats", "describe", "TTestResult",
    "paired_ttest", "pearson_r", "correlation_p", "significance_marker", "Coefficient",
    "RegressionResult", "ols", "PREDICTORS", "PREDICTOR_LABELS", "Coding", "predictor_rows",
    "DeterminantsReport", "determinants_report", "WeekPattern", "weekend_vs_weekday",
    "device_hours_table", "daily_hours_stats",
]
