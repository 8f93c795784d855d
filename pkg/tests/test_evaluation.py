import math

import numpy as np
import pytest

from conftest import PUBLISHED_CONFUSION, PUBLISHED_METRICS
from retina_et import ensemble, evaluation, synthetic
from retina_et.ensemble import HyperParams
from retina_et.evaluation import ConfusionMatrix, reports
from retina_et.features import CLASS_NAMES, FeatureTable, LabeledSample

import oracles


# -- confusion and metrics ------------------------------------------------------

def test_confusion_direct_count():
    cm = evaluation.confusion_matrix([0, 0, 1], [0, 1, 1], 2)
    assert cm.counts.tolist() == [[1, 1], [0, 1]]
    assert cm.total == 3


def test_confusion_perfect_is_diagonal():
    y = np.arange(5).repeat(4)
    cm = evaluation.confusion_matrix(y, y, 5)
    assert np.array_equal(cm.counts, np.diag(np.full(5, 4)))
    assert cm.accuracy() == 100.0


def test_confusion_marginals(rng):
    t = rng.integers(0, 4, 300)
    p = rng.integers(0, 4, 300)
    cm = evaluation.confusion_matrix(t, p, 4)
    assert cm.counts.sum(axis=1).tolist() == np.bincount(t, minlength=4).tolist()
    assert cm.counts.sum(axis=0).tolist() == np.bincount(p, minlength=4).tolist()


def test_confusion_errors():
    with pytest.raises(ValueError, match="length"):
        evaluation.confusion_matrix([0, 1], [0], 2)
    with pytest.raises(ValueError, match="range"):
        evaluation.confusion_matrix([0, 2], [0, 1], 2)
    with pytest.raises(ValueError):
        ConfusionMatrix(np.array([[1, -1], [0, 0]]))


def test_fig9_accuracy():
    cm = ConfusionMatrix(PUBLISHED_CONFUSION, CLASS_NAMES)
    assert cm.total == 16150
    assert cm.accuracy() == pytest.approx(100 * 14709 / 16150)
    assert cm.accuracy() == pytest.approx(91.08, abs=0.01)


@pytest.mark.parametrize("name", CLASS_NAMES)
def test_fig9_table3_per_class(name):
    m = evaluation.precision_recall_f1(ConfusionMatrix(PUBLISHED_CONFUSION, CLASS_NAMES))
    i = CLASS_NAMES.index(name)
    got = (m.precision[i], m.recall[i], m.f1[i])
    for g, want in zip(got, PUBLISHED_METRICS[name]):
        assert abs(g - want) <= 0.01 + 1e-9
    assert m.f1[i] == pytest.approx(2 * got[0] * got[1] / (got[0] + got[1]))


def test_identity_matrix_metrics():
    m = evaluation.precision_recall_f1(ConfusionMatrix(np.eye(3, dtype=int)))
    assert m.precision.tolist() == m.recall.tolist() == m.f1.tolist() == [100.0] * 3
    assert m.macro_f1 == 100.0


def test_undefined_class_excluded_from_macro(caplog):
    cm = ConfusionMatrix(np.array([[3, 0, 0], [0, 2, 0], [0, 0, 0]]), ("a", "b", "c"))
    m = evaluation.precision_recall_f1(cm)
    assert math.isnan(m.f1[2]) and math.isnan(m.recall[2])
    assert m.macro_f1 == 100.0
    assert "undefined" in caplog.text


def test_empty_matrix_rejected():
    with pytest.raises(ValueError):
        evaluation.precision_recall_f1(ConfusionMatrix(np.zeros((2, 2), int)))


def test_display_rows_round_to_two_decimals():
    rows = list(evaluation.precision_recall_f1(ConfusionMatrix(PUBLISHED_CONFUSION, CLASS_NAMES)).rows())
    assert rows[2] == ("Mo", 81.35, 63.95, 71.61)  # 71.612 at full precision
    assert rows[-1][0] == "Average" and len(rows) == 6


def test_confusion_sum():
    a = ConfusionMatrix(np.array([[1, 0], [0, 1]]))
    b = ConfusionMatrix(np.array([[0, 2], [1, 0]]))
    assert (a + b).counts.tolist() == [[1, 2], [1, 1]]


# -- ROC --------------------------------------------------------------------------

def _check_staircase(curve):
    assert curve.points[0] == (0.0, 0.0) and curve.points[-1] == (1.0, 1.0)
    assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)
    assert 0.0 <= curve.auc <= 1.0


def test_roc_perfect_ranking():
    curve = evaluation.roc_curve(np.array([0.9, 0.8, 0.3, 0.1]), [1, 1, 0, 0], 1)
    assert curve.auc == 1.0
    _check_staircase(curve)


def test_roc_identical_scores():
    curve = evaluation.roc_curve(np.full(6, 0.4), [0, 1, 0, 1, 1, 0], 1)
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]
    assert curve.auc == 0.5


def test_roc_coin_flips():
    rng = np.random.default_rng(2024)
    labels = rng.integers(0, 2, 1000)
    curve = evaluation.roc_curve(rng.random(1000), labels, 1)
    assert abs(curve.auc - 0.5) <= 0.05


def test_roc_matches_pairwise_oracle_and_inversion(rng):
    for _ in range(10):
        labels = rng.integers(0, 3, 80)
        labels[:3] = [0, 1, 2]
        scores = rng.integers(0, 10, (80, 3)) / 10.0  # coarse grid forces ties
        for c in range(3):
            curve = evaluation.roc_curve(scores, labels, c)
            _check_staircase(curve)
            assert curve.auc == pytest.approx(oracles.auc_by_pairs(scores[:, c], labels == c), abs=1e-12)
            inverted = evaluation.roc_curve(-scores[:, c], labels, c)
            assert inverted.auc == pytest.approx(1 - curve.auc, abs=1e-12)


def test_roc_errors():
    with pytest.raises(ValueError, match="absent"):
        evaluation.roc_curve(np.array([0.1, 0.2]), [0, 0], 1)
    with pytest.raises(ValueError, match="every"):
        evaluation.roc_curve(np.array([0.1, 0.2]), [1, 1], 1)


# -- splits -------------------------------------------------------------------------

def test_kfold_exact_divisibility():
    labels = [0] * 5 + [1] * 5
    fa = evaluation.stratified_kfold(labels, 5, seed=3)
    for f in range(5):
        assert sorted(np.asarray(labels)[fa.test_indices(f)].tolist()) == [0, 1]


@pytest.mark.parametrize("seed", range(5))
def test_kfold_partition_and_balance(seed, rng):
    labels = rng.integers(0, 4, 237)
    labels[:40] = np.arange(40) % 4
    fa = evaluation.stratified_kfold(labels, 10, seed=seed)
    tests = [fa.test_indices(f) for f in range(10)]
    assert sorted(np.concatenate(tests).tolist()) == list(range(237))
    for f in range(10):
        assert len(np.intersect1d(tests[f], fa.train_indices(f))) == 0
    for c in range(4):
        per_fold = [int(np.sum(labels[t] == c)) for t in tests]
        assert max(per_fold) - min(per_fold) <= 1


def test_kfold_grouping_keeps_augments_together():
    labels, groups, ids = [], [], []
    for i in range(30):
        for j in range(4 if i % 3 else 1):
            labels.append(i % 3)
            groups.append(f"g{i}")
            ids.append(f"g{i}_{j}")
    fa = evaluation.stratified_kfold(labels, 5, seed=1, groups=groups, sample_ids=ids)
    by_group = {}
    for g, f in zip(groups, fa.folds):
        by_group.setdefault(g, set()).add(int(f))
    assert all(len(s) == 1 for s in by_group.values())
    assert set(fa.fold_of) == set(ids)


def test_kfold_deterministic():
    labels = np.arange(100) % 5
    a = evaluation.stratified_kfold(labels, 10, seed=4).folds
    assert np.array_equal(a, evaluation.stratified_kfold(labels, 10, seed=4).folds)
    assert not np.array_equal(a, evaluation.stratified_kfold(labels, 10, seed=5).folds)


def test_kfold_errors():
    with pytest.raises(ValueError, match="fewer than k"):
        evaluation.stratified_kfold([0] * 10 + [1] * 3, 5)
    with pytest.raises(ValueError):
        evaluation.stratified_kfold([0, 1], 1)
    with pytest.raises(ValueError, match="mixes"):
        evaluation.stratified_kfold([0, 1, 0, 1], 2, groups=["a", "a", "b", "c"])


def test_holdout_proportions():
    counts = [1410, 322, 874, 180, 274]
    labels = np.repeat(np.arange(5), counts)
    tr, te = evaluation.stratified_holdout(labels, 0.3, seed=0)
    assert len(tr) + len(te) == len(labels) and not np.intersect1d(tr, te).size
    for c, n in enumerate(counts):
        assert abs(int(np.sum(labels[te] == c)) - 0.3 * n) <= 1
        assert abs(int(np.sum(labels[tr] == c)) - 0.7 * n) <= 1


# -- protocols ------------------------------------------------------------------------

def _table(X, y, names):
    return synthetic.as_table(X, y, names)


@pytest.fixture(scope="module")
def small_table(small_data):
    X, y = small_data
    return _table(X, y, ("a", "b", "c"))


def test_cross_validate_invariants(small_table):
    rep = evaluation.cross_validate(small_table, HyperParams(n_estimators=20, seed=1), k=5)
    assert len(rep.fold_accuracies) == 5
    assert rep.mean_accuracy == pytest.approx(sum(rep.fold_accuracies) / 5)
    assert rep.confusion.total == len(small_table)
    assert np.allclose(rep.scores.sum(axis=1), 1.0)
    assert set(rep.roc) == {0, 1, 2}
    assert rep.config["params"]["n_estimators"] == 20 and rep.config["seed"] == 1


def test_cross_validate_reproducible(small_table):
    params = HyperParams(n_estimators=10, seed=6)
    a = evaluation.cross_validate(small_table, params, k=3)
    b = evaluation.cross_validate(small_table, params, k=3, n_jobs=3)
    assert a.fold_accuracies == b.fold_accuracies
    assert np.array_equal(a.scores, b.scores)


def test_cross_validate_groups_augments():
    X, y = synthetic.separable_classes(n_per_class=12, n_classes=2, n_features=6, seed=2)
    samples = []
    for i, (x, label) in enumerate(zip(X, y)):
        samples.append(LabeledSample(f"img{i}", x, int(label)))
        samples.append(LabeledSample(f"img{i}_rot90", x, int(label), "augmented", f"img{i}"))
    table = FeatureTable(samples, ("p", "q"))
    rep = evaluation.cross_validate(table, HyperParams(n_estimators=5), k=4)
    fold_of = rep.assignment.fold_of
    assert all(fold_of[f"img{i}"] == fold_of[f"img{i}_rot90"] for i in range(len(X)))
    # perfect memorization would be possible without grouping
    assert rep.confusion.total == 2 * len(X)


def test_holdout_report(small_table):
    rep = evaluation.holdout(small_table, HyperParams(n_estimators=10), test_fraction=0.3)
    assert len(rep.test_indices) == 27 and len(rep.train_indices) == 63
    assert rep.confusion.total == 27
    assert 0 <= rep.accuracy <= 100


def test_oob_sweep_shape(small_data):
    X, y = small_data
    rows = evaluation.oob_sweep(X, y, [5, 200], ["all", "log2"], seed=0)
    assert len(rows) == 4
    assert {(r.n_estimators, r.mode) for r in rows} == {(5, "all"), (200, "all"), (5, "log2"), (200, "log2")}
    assert all(0 <= r.oob_error <= 1 for r in rows)
    with pytest.raises(ValueError):
        evaluation.oob_sweep(X, y, [], ["all"])


def test_derive_seed_stable():
    assert evaluation.derive_seed(0, 1) == evaluation.derive_seed(0, 1)
    assert evaluation.derive_seed(0, 1) != evaluation.derive_seed(0, 2)


# -- report files ---------------------------------------------------------------------

def test_cv_report_files(tmp_path, small_table):
    rep = evaluation.cross_validate(small_table, HyperParams(n_estimators=8), k=5)
    config = {"seed": 0, "k_folds": 5}
    paths = reports.write_cv_report(rep, tmp_path, config)
    names = {p.name for p in paths}
    assert {"cv_report.csv", "confusion.csv", "metrics.csv", "roc_a.csv", "roc_b.csv", "roc_c.csv"} <= names

    comments, header, rows = reports.read_csv(tmp_path / "cv_report.csv")
    assert header == ["fold", "accuracy"] and len(rows) == 5
    assert comments["config"] == '{"k_folds":5,"seed":0}'
    assert float(comments["mean_accuracy"]) == pytest.approx(rep.mean_accuracy)
    assert comments["reference_fold_range"] == "87.67-92.87"

    _, header, rows = reports.read_csv(tmp_path / "confusion.csv")
    assert header[1:] == ["a", "b", "c"]
    assert sum(int(v) for r in rows for v in r[1:]) == len(small_table)

    _, header, rows = reports.read_csv(tmp_path / "metrics.csv")
    assert header == ["class", "precision", "recall", "f1"] and rows[-1][0] == "Average"

    comments, header, rows = reports.read_csv(tmp_path / "roc_a.csv")
    assert header == ["fpr", "tpr"] and float(comments["auc"]) == pytest.approx(rep.roc[0].auc)
    assert rows[0] == ["0.0", "0.0"] and rows[-1] == ["1.0", "1.0"]


def test_sweep_and_holdout_files(tmp_path, small_table):
    rows = evaluation.oob_sweep(small_table.X, small_table.y, [3, 6], ["sqrt"])
    (path,) = reports.write_sweep(rows, tmp_path / "oob_sweep.csv", {"seed": 0})
    comments, header, data = reports.read_csv(path)
    assert header[:3] == ["n_estimators", "mode", "oob_error"] and len(data) == 2
    assert "config" in comments

    rep = evaluation.holdout(small_table, HyperParams(n_estimators=4))
    paths = reports.write_holdout(rep, tmp_path, {"seed": 0})
    assert all(p.read_text().startswith("# config: ") for p in paths)
    summary = reports.summarize(tmp_path)
    assert "Hold-out: train 63, test 27" in summary and "OOB sweep" in summary


def test_svg_output(tmp_path, small_table):
    pytest.importorskip("matplotlib")
    rows = evaluation.oob_sweep(small_table.X, small_table.y, [3, 6], ["sqrt", "all"])
    paths = reports.write_sweep(rows, tmp_path / "oob_sweep.csv", {}, svg=True)
    assert paths[1].suffix == ".svg" and paths[1].read_text().lstrip().startswith("<?xml")
    rep = evaluation.cross_validate(small_table, HyperParams(n_estimators=4), k=3)
    written = reports.write_cv_report(rep, tmp_path / "cv", {}, svg=True)
    assert any(p.suffix == ".svg" for p in written)


def test_model_predictions_feed_confusion(small_data):
    X, y = small_data
    model = ensemble.train(X, y, HyperParams(n_estimators=10))
    cm = evaluation.confusion_matrix(y, ensemble.predict(model, X), 3)
    assert cm.total == len(y)
