import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artcode_mr.classifier import TrainConfig
from artcode_mr.errors import DatasetError, FoldTooSmall, InvalidSpec
from artcode_mr.evaluation import (
    ConfusionCounts, CvPlan, FeatureBank, MetricSet, coin_records, compute_metrics, fold_assignment,
    net_rectification, ntrees_sweep, out_of_fold_records, rectification_report, rho_groups, run_cv,
    write_sweep_csv,
)
from artcode_mr.mr import MrConfig, RhoRecord, Thresholds


def test_mcc_fixture_on_normalized_rates():
    m = compute_metrics(ConfusionCounts(tp=0.3, tn=0.85, fn=0.15, fp=0.7))
    assert m.mcc == pytest.approx(0.1796, abs=5e-5)


def test_perfect_classifier():
    m = compute_metrics(ConfusionCounts(tp=10, tn=20))
    assert m.as_dict() == {n: 1.0 for n in MetricSet.NAMES}


def test_all_positive_predictor():
    m = compute_metrics(ConfusionCounts(tp=50, fp=50))
    assert (m.recall, m.precision, m.tnr, m.mcc) == (1.0, 0.5, 0.0, 0.0)


def test_f_beta_formula():
    c = ConfusionCounts(tp=8, fp=3, tn=20, fn=4)
    m1, m2 = compute_metrics(c, beta=1), compute_metrics(c)
    p, r = 8 / 11, 8 / 12
    assert m1.f_beta == pytest.approx(2 * p * r / (p + r))
    assert m2.f_beta == pytest.approx(5 * p * r / (4 * p + r))


@settings(max_examples=100, deadline=None)
@given(*(st.integers(0, 50) for _ in range(4)))
def test_metric_identities(tp, fp, tn, fn):
    if tp + fp + tn + fn == 0:
        return
    c = ConfusionCounts(tp, fp, tn, fn)
    m = compute_metrics(c)
    assert m.accuracy == pytest.approx((tp + tn) / (tp + fp + tn + fn))
    swapped = compute_metrics(ConfusionCounts(tn, fn, tp, fp))
    assert m.mcc == pytest.approx(swapped.mcc)
    for name in ("precision", "recall", "accuracy", "tnr", "f_beta"):
        assert 0 <= getattr(m, name) <= 1
    assert -1 - 1e-12 <= m.mcc <= 1 + 1e-12


def test_metric_input_validation():
    with pytest.raises(InvalidSpec):
        compute_metrics(ConfusionCounts())
    with pytest.raises(InvalidSpec):
        ConfusionCounts(tp=-1)


def test_two_folds_on_three_samples():
    labels = np.array([1, 1, 1, 0, 0, 0, 0])
    folds = fold_assignment(labels, 2, True, np.random.default_rng(0))
    assert sorted(np.bincount(folds[labels == 1]).tolist()) == [1, 2]


def test_too_many_folds():
    with pytest.raises(FoldTooSmall):
        fold_assignment(np.array([1, 1, 0, 0, 0]), 3, True, np.random.default_rng(0))


@settings(max_examples=50, deadline=None)
@given(st.integers(5, 60), st.integers(5, 120), st.integers(2, 5), st.integers(0, 1000))
def test_fold_partition_and_stratification(n_pos, n_neg, k, seed):
    labels = np.r_[np.ones(n_pos, int), np.zeros(n_neg, int)]
    folds = fold_assignment(labels, k, True, np.random.default_rng(seed))
    assert set(folds.tolist()) == set(range(k))
    ratio = n_pos / (n_pos + n_neg)
    for f in range(k):
        members = labels[folds == f]
        assert abs(members.sum() - ratio * len(members)) <= 1 + 1e-9


def _record(image_id, original, final):
    return RhoRecord(image_id, (0.0,) * 8, 0.5, original, final, original != final)


CRAFTED_TRUTH = {f"a{i}": "artcode" for i in range(4)} | {f"n{i}": "non_artcode" for i in range(6)}
CRAFTED = [
    _record("a0", "non_artcode", "artcode"),      # correct
    _record("a1", "non_artcode", "artcode"),      # correct
    _record("a2", "artcode", "non_artcode"),      # incorrect
    _record("a3", "artcode", "artcode"),
    _record("n0", "artcode", "non_artcode"),      # correct
    _record("n1", "non_artcode", "artcode"),      # incorrect
    _record("n2", "non_artcode", "artcode"),      # incorrect
    _record("n3", "non_artcode", "non_artcode"),
    _record("n4", "artcode", "artcode"),
    _record("n5", "artcode", "non_artcode"),      # correct
]


def test_crafted_rectification_tallies():
    s = rectification_report(CRAFTED, CRAFTED_TRUTH)
    assert (s.artcode.correct, s.artcode.incorrect) == (2, 1)
    assert (s.non_artcode.correct, s.non_artcode.incorrect) == (2, 2)
    assert (s.artcode.size, s.non_artcode.size) == (4, 6)
    assert s.artcode.correct_pct == 0.5
    assert s.net_percentage == pytest.approx((2 - 1 + 2 - 2) / 10)


def test_net_rectification_fixture():
    assert 100 * net_rectification(13.3, 1.9, 7.3, 15.6, 163) == pytest.approx(1.91, abs=0.01)


def test_nothing_rectified():
    recs = [_record("a0", "artcode", "artcode"), _record("n0", "artcode", "artcode")]
    s = rectification_report(recs, {"a0": "artcode", "n0": "non_artcode"})
    assert s.net_percentage == 0 and s.artcode.correct == s.non_artcode.incorrect == 0


def test_single_wrong_rectification():
    s = rectification_report([_record("n0", "non_artcode", "artcode")], {"n0": "non_artcode"})
    assert (s.non_artcode.correct, s.non_artcode.incorrect) == (0, 1)


def test_report_needs_truth():
    with pytest.raises(DatasetError):
        rectification_report([_record("zz", "artcode", "non_artcode")], {})


@pytest.fixture(scope="module")
def toy_bank():
    """Features where Artcode rows and their blocks lean one way, with overlap."""
    rng = np.random.default_rng(0)
    n_pos, n_neg = 20, 40
    y = np.r_[np.ones(n_pos, int), np.zeros(n_neg, int)]
    feats = rng.normal(size=(len(y), 9, 4)) + 0.9 * y[:, None, None]
    ids = tuple(f"a{i}" for i in range(n_pos)) + tuple(f"n{i}" for i in range(n_neg))
    return FeatureBank(ids, y, feats)


def test_cv_online_tallies_match_report(toy_bank):
    res = run_cv(toy_bank, TrainConfig(n_trees=10), MrConfig(), CvPlan(k=4, repeats=3, seed=1))
    truth = dict(zip(toy_bank.ids, ("artcode" if v else "non_artcode" for v in toy_bank.labels)))
    assert len(res.records) == 3 * len(toy_bank.ids)
    assert rectification_report(res.records, truth) == res.rectification


def test_cv_macro_average(toy_bank):
    res = run_cv(toy_bank, TrainConfig(n_trees=10), MrConfig(), CvPlan(k=4, repeats=3, seed=1))
    for name in MetricSet.NAMES:
        assert getattr(res.original, name) == pytest.approx(np.mean([getattr(m, name) for m in res.per_repeat_original]))
    assert set(res.gains()) == set(MetricSet.NAMES)


def test_cv_is_deterministic(toy_bank):
    plan = CvPlan(k=3, repeats=2, seed=5)
    a = run_cv(toy_bank, TrainConfig(n_trees=5), MrConfig(), plan).to_json()
    b = run_cv(toy_bank, TrainConfig(n_trees=5), MrConfig(), plan).to_json()
    assert a == b


def test_cv_without_mr(toy_bank):
    res = run_cv(toy_bank, TrainConfig(algo="svm"), None, CvPlan(k=3, repeats=2))
    assert res.augmented is None and res.rectification is None and res.records == ()
    assert res.gains() is None and "augmented" not in res.to_json()


def test_cv_plan_validation(toy_bank):
    with pytest.raises(InvalidSpec):
        CvPlan(k=1)
    with pytest.raises(FoldTooSmall):
        run_cv(toy_bank, TrainConfig(n_trees=3), MrConfig(), CvPlan(k=30, repeats=1))


def test_equal_thresholds_leave_no_dead_zone(toy_bank):
    res = run_cv(toy_bank, TrainConfig(n_trees=5), MrConfig(thresholds=Thresholds(0.35, 0.35)), CvPlan(k=3, repeats=1))
    for r in res.records:
        assert r.final == ("artcode" if r.rho >= 0.35 else "non_artcode")


def test_sweep_rows_and_csv(toy_bank, tmp_path):
    rows = ntrees_sweep(toy_bank, TrainConfig(), MrConfig(), CvPlan(k=3, repeats=1), grid=(5, 10))
    assert len(rows) == 8
    svm = [r for r in rows if r["algo"] == "svm" and r["variant"] == "ori"]
    assert svm[0]["accuracy"] == svm[1]["accuracy"]
    write_sweep_csv(tmp_path / "c.csv", rows)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "algo,variant,ntrees,precision,recall,accuracy,tnr,f_beta,mcc"
    assert len(lines[1].split(",")[3]) == len("0.000000")


def test_out_of_fold_records_cover_each_image_once(toy_bank):
    recs = out_of_fold_records(toy_bank, TrainConfig(n_trees=5), MrConfig(), k=3)
    assert [r.image_id for r in recs] == list(toy_bank.ids)


def test_coin_records_and_groups():
    ids = [f"a{i}" for i in range(50)] + [f"n{i}" for i in range(50)]
    recs = coin_records(ids, MrConfig(), seed=3)
    assert recs == coin_records(ids, MrConfig(), seed=3)
    rhos = np.array([r.rho for r in recs])
    assert 0.35 < rhos.mean() < 0.65
    truth = {i: "artcode" if i[0] == "a" else "non_artcode" for i in ids}
    a, n = rho_groups(recs, truth)
    assert len(a) == 50 and len(n) == 50
