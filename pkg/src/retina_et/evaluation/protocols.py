"""Cross-validation, hold-out evaluation and the OOB hyperparameter sweep."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .. import ensemble
from ..features import FeatureTable
from .metrics import ClassMetrics, ConfusionMatrix, confusion_matrix, precision_recall_f1
from .roc import RocCurve, roc_curve
from .splits import FoldAssignment, stratified_holdout, stratified_kfold

logger = logging.getLogger(__name__)


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed, stable for a given ``(seed, keys)``."""
    seq = np.random.SeedSequence(seed, spawn_key=tuple(keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass
class CvReport:
    fold_accuracies: list[float]
    confusion: ConfusionMatrix
    metrics: ClassMetrics
    roc: dict[int, RocCurve]
    scores: np.ndarray
    predictions: np.ndarray
    assignment: FoldAssignment
    config: dict = field(default_factory=dict)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))


def _pooled_roc(scores, labels, n_classes):
    curves = {}
    for c in range(n_classes):
        try:
            curves[c] = roc_curve(scores, labels, c)
        except ValueError as exc:
            logger.warning("no ROC for class %d: %s", c, exc)
    return curves


def cross_validate(table: FeatureTable, params: ensemble.HyperParams | None = None, k: int = 10,
                   seed: int | None = None, group_augments: bool = True,
                   normalize: bool = False, n_jobs: int = 1) -> CvReport:
    """Stratified k-fold evaluation.

    Fold ``f`` trains with a tree seed derived from ``(params.seed, f)``, so
    results do not depend on fold execution order.
    """
    params = params or ensemble.HyperParams()
    seed = params.seed if seed is None else seed
    X = table.matrix(normalize)
    y = table.y
    n_classes = len(table.class_names)
    assignment = stratified_kfold(
        y, k, seed=seed,
        groups=table.groups if group_augments else None,
        sample_ids=[s.sample_id for s in table.samples],
    )

    scores = np.zeros((len(y), n_classes))
    fold_acc = []
    total = ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64), table.class_names)
    for fold in range(k):
        tr, te = assignment.train_indices(fold), assignment.test_indices(fold)
        fold_params = dataclasses.replace(params, seed=derive_seed(params.seed, fold))
        model = ensemble.train(X[tr], y[tr], fold_params, n_classes=n_classes,
                               class_names=table.class_names, n_jobs=n_jobs)
        proba = ensemble.predict_proba(model, X[te])
        scores[te] = proba
        cm = confusion_matrix(y[te], np.argmax(proba, axis=1), n_classes, table.class_names)
        fold_acc.append(cm.accuracy())
        total = total + cm
        logger.info("fold %d/%d accuracy %.2f%%", fold + 1, k, fold_acc[-1])

    predictions = np.argmax(scores, axis=1)
    config = {"k": k, "seed": seed, "group_augments": group_augments, "normalize": normalize,
              "params": params.to_dict(), "n_candidates": ensemble.n_candidates(params.max_features, X.shape[1])}
    return CvReport(fold_acc, total, precision_recall_f1(total), _pooled_roc(scores, y, n_classes),
                    scores, predictions, assignment, config)


@dataclass
class HoldoutReport:
    accuracy: float
    confusion: ConfusionMatrix
    metrics: ClassMetrics
    roc: dict[int, RocCurve]
    train_indices: np.ndarray
    test_indices: np.ndarray
    config: dict = field(default_factory=dict)


def holdout(table: FeatureTable, params: ensemble.HyperParams | None = None, test_fraction: float = 0.3,
            seed: int | None = None, group_augments: bool = True, normalize: bool = False,
            n_jobs: int = 1) -> HoldoutReport:
    """Single stratified train/test evaluation (70/30 by default)."""
    params = params or ensemble.HyperParams()
    seed = params.seed if seed is None else seed
    X = table.matrix(normalize)
    y = table.y
    n_classes = len(table.class_names)
    tr, te = stratified_holdout(y, test_fraction, seed, table.groups if group_augments else None)
    model = ensemble.train(X[tr], y[tr], params, n_classes=n_classes,
                           class_names=table.class_names, n_jobs=n_jobs)
    proba = ensemble.predict_proba(model, X[te])
    cm = confusion_matrix(y[te], np.argmax(proba, axis=1), n_classes, table.class_names)
    config = {"test_fraction": test_fraction, "seed": seed, "group_augments": group_augments,
              "normalize": normalize, "params": params.to_dict()}
    return HoldoutReport(cm.accuracy(), cm, precision_recall_f1(cm), _pooled_roc(proba, y[te], n_classes),
                         tr, te, config)


@dataclass(frozen=True)
class SweepRow:
    n_estimators: int
    mode: str
    oob_error: float
    n_skipped: int


def oob_sweep(X, y, n_estimator_grid, max_features_modes=ensemble.MAX_FEATURES_MODES, seed: int = 0,
              n_min: int = 2, n_jobs: int = 1, n_classes: int | None = None) -> list[SweepRow]:
    """OOB error for every ``(n_estimators, mode)`` pair.

    Each pair is its own training run seeded with ``seed``; bootstrap is
    always on.
    """
    grid = list(n_estimator_grid)
    modes = list(max_features_modes)
    if not grid or not modes:
        raise ValueError("sweep grid and mode list must be nonempty")
    rows = []
    for mode in modes:
        for n in grid:
            params = ensemble.HyperParams(n_estimators=n, max_features=mode, n_min=n_min,
                                          bootstrap=True, seed=seed)
            model = ensemble.train(X, y, params, n_classes=n_classes, n_jobs=n_jobs)
            est = ensemble.oob_estimate(model, X, y)
            rows.append(SweepRow(n, mode, est.error, est.n_skipped))
            logger.info("oob n_estimators=%d mode=%s error=%.4f", n, mode, est.error)
    return rows
