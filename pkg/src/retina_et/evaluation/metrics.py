from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true labels, columns predicted labels."""

    counts: np.ndarray
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(counts < 0):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts)
        if not self.class_names:
            object.__setattr__(self, "class_names", tuple(str(i) for i in range(len(counts))))

    @property
    def n_classes(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        """Fraction of predictions on the diagonal, as a percentage."""
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return 100.0 * float(np.trace(self.counts)) / self.total

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts, self.class_names)


def confusion_matrix(true_labels, predicted_labels, n_classes: int, class_names=()) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.size} true vs {p.size} predicted labels")
    for name, arr in (("true", t), ("predicted", p)):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise ValueError(f"{name} label out of range [0, {n_classes})")
    counts = np.bincount(t * n_classes + p, minlength=n_classes * n_classes)
    return ConfusionMatrix(counts.reshape(n_classes, n_classes), tuple(class_names))


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class precision, recall and F1 in percent; NaN marks undefined."""

    class_names: tuple[str, ...]
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray

    @staticmethod
    def _macro(values: np.ndarray) -> float:
        defined = values[~np.isnan(values)]
        return float(defined.mean()) if defined.size else math.nan

    @property
    def macro_precision(self) -> float:
        return self._macro(self.precision)

    @property
    def macro_recall(self) -> float:
        return self._macro(self.recall)

    @property
    def macro_f1(self) -> float:
        return self._macro(self.f1)

    def rows(self, decimals: int = 2):
        """Display rows ``(name, precision, recall, f1)`` plus the average."""
        for i, name in enumerate(self.class_names):
            yield name, *(round(float(a[i]), decimals) for a in (self.precision, self.recall, self.f1))
        yield "Average", *(round(v, decimals) for v in (self.macro_precision, self.macro_recall, self.macro_f1))


def precision_recall_f1(matrix: ConfusionMatrix) -> ClassMetrics:
    if matrix.total == 0:
        raise ValueError("empty confusion matrix")
    counts = matrix.counts.astype(np.float64)
    tp = np.diag(counts)
    actual = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        recall = np.where(actual > 0, 100.0 * tp / actual, np.nan)
        precision = np.where(predicted > 0, 100.0 * tp / predicted, np.nan)
        f1 = np.where(precision + recall > 0, 2 * precision * recall / (precision + recall), 0.0)
    f1 = np.where(np.isnan(precision) | np.isnan(recall), np.nan, f1)
    for i in np.flatnonzero(np.isnan(f1)):
        logger.warning("class %s has no true instance or no prediction; metrics undefined",
                       matrix.class_names[i])
    return ClassMetrics(matrix.class_names, precision, recall, f1)
