import math

import numpy as np
import pytest
from scipy import stats as sps

from streamfootprint.analysis import (
    PREDICTORS, AnalysisError, Coding, RankDeficiencyError, correlation_p, describe,
    determinants_report, device_hours_table, daily_hours_stats, ols, paired_ttest, pearson_r,
    predictor_rows, significance_marker, weekend_vs_weekday,
)
from streamfootprint.diary import ParticipantProfile, check_dataset
from streamfootprint.engine import cohort_footprints
from streamfootprint.params import DeviceKind, default_params

from synth import PLANTED, exact_ols, synth_cohort


def random_instance(rng, n=None, k=None):
    n = n or int(rng.integers(6, 16))
    k = k or int(rng.integers(1, 5))
    X = np.round(rng.normal(0, 2, size=(n, k)), 3)
    beta = rng.choice([-1, 1], size=k) * rng.uniform(0.5, 3, size=k)
    y = np.round(1.5 + X @ beta + rng.normal(0, 1, size=n), 3)
    return y, X


def assert_matches_oracle(y, X, rel=1e-9):
    res = ols(y, X)
    coef, var, r2 = exact_ols(y, X)
    assert math.isclose(res.intercept, float(coef[0]), rel_tol=rel)
    assert math.isclose(res.intercept_se, math.sqrt(float(var[0])), rel_tol=rel)
    for j, c in enumerate(res.coefficients):
        assert math.isclose(c.b, float(coef[j + 1]), rel_tol=rel)
        assert math.isclose(c.se, math.sqrt(float(var[j + 1])), rel_tol=rel)
    assert math.isclose(res.r_squared, float(r2), rel_tol=rel)


def test_ols_matches_exact_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        assert_matches_oracle(*random_instance(rng))


def test_ols_against_reference_statistics():
    rng = np.random.default_rng(11)
    y, X = random_instance(rng, n=40, k=3)
    res = ols(y, X)
    n, k = X.shape
    for j, c in enumerate(res.coefficients):
        assert math.isclose(c.t, c.b / c.se)
        assert math.isclose(c.p, 2 * sps.t.sf(abs(c.t), n - k - 1), rel_tol=1e-8)
        assert math.isclose(c.beta, c.b * X[:, j].std(ddof=1) / y.std(ddof=1))
    assert res.df_resid == n - k - 1


def test_single_predictor_beta_equals_r():
    rng = np.random.default_rng(3)
    x = rng.normal(size=30)
    y = 2 * x + rng.normal(size=30)
    res = ols(y, x)
    assert math.isclose(res.coefficients[0].beta, pearson_r(x, y), rel_tol=1e-12)


def test_rank_deficiency_names_column():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(20, 3))
    X[:, 2] = X[:, 0] - 2 * X[:, 1]
    with pytest.raises(RankDeficiencyError) as info:
        ols(rng.normal(size=20), X, ["a", "b", "c"])
    assert info.value.column == "c"
    X2 = np.column_stack([rng.normal(size=20), np.full(20, 4.0)])
    with pytest.raises(RankDeficiencyError, match="constant"):
        ols(rng.normal(size=20), X2, ["x", "constant"])


def test_ols_input_errors():
    with pytest.raises(AnalysisError):
        ols([1, 2], [[1], [2]])
    with pytest.raises(AnalysisError, match="constant"):
        ols([1.0] * 6, [[1], [2], [3], [4], [5], [7]])
    with pytest.raises(AnalysisError):
        ols([1, 2, 3, 4], [[1], [2], [3]])
    with pytest.raises(AnalysisError, match="labels"):
        ols([1, 2, 3, 4, 5], [[1], [2], [3], [4], [6]], ["a", "b"])


def test_paired_ttest_matches_scipy():
    rng = np.random.default_rng(2)
    a = rng.normal(3, 1, size=25)
    b = a - 0.4 + rng.normal(0, 0.5, size=25)
    res = paired_ttest(a, b)
    ref = sps.ttest_rel(a, b)
    assert math.isclose(res.t_value, ref.statistic, rel_tol=1e-10)
    assert math.isclose(res.p_value, ref.pvalue, rel_tol=1e-8)
    d = a - b
    assert math.isclose(res.cohens_d, d.mean() / d.std(ddof=1), rel_tol=1e-10)
    assert res.df == 24


def test_paired_ttest_errors():
    with pytest.raises(AnalysisError):
        paired_ttest([1.0], [2.0])
    with pytest.raises(AnalysisError):
        paired_ttest([1.0, 2.0], [1.0])
    with pytest.raises(AnalysisError, match="zero variance"):
        paired_ttest([1.0, 2.0, 3.0], [0.0, 1.0, 2.0])


def test_describe():
    s = describe([1.0, 2.0, 3.0, 6.0])
    assert (s.n, s.mean, s.min, s.max) == (4, 3.0, 1.0, 6.0)
    assert math.isclose(s.sd, np.std([1, 2, 3, 6], ddof=1))
    assert describe([5.0]).sd is None
    with pytest.raises(AnalysisError):
        describe([])


def test_correlation():
    rng = np.random.default_rng(1)
    x = rng.normal(size=50)
    y = x + rng.normal(size=50)
    ref = sps.pearsonr(x, y)
    r = pearson_r(x, y)
    assert math.isclose(r, ref.statistic, rel_tol=1e-12)
    assert math.isclose(correlation_p(r, 50), ref.pvalue, rel_tol=1e-8)
    with pytest.raises(AnalysisError):
        pearson_r([1, 1, 1], [1, 2, 3])


@pytest.mark.parametrize("p,marker", [(0.0005, "**"), (0.005, "*"), (0.03, "+"), (0.2, ""),
                                      (float("nan"), "")])
def test_significance_marker(p, marker):
    assert significance_marker(p) == marker


def test_predictor_coding():
    profiles = [
        ParticipantProfile("a", gender="female", mobile_flatrate_gb=4.0, paid_membership=True,
                           education_level="tertiary", income_band="low"),
        ParticipantProfile("b", gender="male", mobile_flatrate_gb=math.inf, paid_membership=False),
        ParticipantProfile("c", gender="other", mobile_flatrate_gb=None),
    ]
    rows = predictor_rows(profiles)
    idx = {name: i for i, name in enumerate(PREDICTORS)}
    assert rows["a"][idx["gender"]] == 1.0 and rows["b"][idx["gender"]] == 0.0
    assert rows["c"][idx["gender"]] is None  # a single "other" row is not coded
    assert rows["b"][idx["flatrate_size"]] == 8.0
    assert rows["a"][idx["education_level"]] == 3.0 and rows["a"][idx["income"]] == 1.0
    assert rows["b"][idx["platform_membership"]] == 0.0
    more = profiles + [ParticipantProfile("d", gender="other")]
    rows = predictor_rows(more, Coding(unlimited_flatrate_factor=3))
    assert rows["c"][idx["gender"]] == 0.0
    assert rows["b"][idx["flatrate_size"]] == 12.0


def test_planted_effects_recovered():
    ds, _ = synth_cohort(300, seed=42, noise_sd=0.1)
    fps = {pid: b.total_kg for pid, b in cohort_footprints(default_params(), ds).items()}
    rep = determinants_report(ds, fps)
    assert rep.excluded == ()
    assert rep.hours.n == 300
    labels = [c.name for c in rep.hours.coefficients]
    for name, c in zip(PREDICTORS, rep.hours.coefficients):
        assert abs(c.b - PLANTED[name]) < 4 * c.se + 1e-9, (name, c.b, c.se)
        if PLANTED[name] != 0:
            assert c.p < 0.001, name
    assert rep.hours.r_squared > 0.9
    assert labels[0] == "Digital literacy"
    assert all(not math.isnan(c.r) for c in rep.gwp.coefficients)


def test_listwise_deletion():
    ds, _ = synth_cohort(40, seed=1)
    profiles = list(ds.participants)
    p0 = profiles[0]
    profiles[0] = ParticipantProfile(p0.participant_id, age=None, gender=p0.gender)
    ds2 = check_dataset(profiles, ds.entries)
    fps = {pid: b.total_kg for pid, b in cohort_footprints(default_params(), ds2).items()}
    rep = determinants_report(ds2, fps)
    assert rep.excluded == (p0.participant_id,)
    assert rep.hours.n == 39


def test_weekend_effect_detected():
    ds, _ = synth_cohort(60, seed=9, weekend_boost=0.8, daily_sd=0.3)
    wk = weekend_vs_weekday(ds)
    assert wk.test.t_value > 0 and wk.test.p_value < 0.001
    assert abs(wk.test.mean_difference - 0.8) < 0.15
    assert wk.test.cohens_d > 1


def test_no_weekend_effect():
    ds, _ = synth_cohort(60, seed=10, daily_sd=0.3)
    assert weekend_vs_weekday(ds).test.p_value > 0.001


def test_descriptive_tables():
    ds, targets = synth_cohort(20, seed=4)
    table = device_hours_table(ds)
    assert set(table) == set(DeviceKind)
    assert all(s.n == 20 for s in table.values())
    daily = daily_hours_stats(ds)
    assert math.isclose(daily.mean, np.mean(list(targets.values())), rel_tol=1e-12)
