from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # score at which each point after the origin is reached
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def roc_curve(scores, true_labels, positive_class: int) -> RocCurve:
    """One-vs-rest ROC for ``positive_class``.

    ``scores`` is either an ``(n, C)`` probability matrix or a 1-D array of
    scores for the positive class.  Samples sharing a score enter the curve
    together, so ties produce a diagonal segment.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim == 2:
        scores = scores[:, positive_class]
    truth = np.asarray(true_labels) == positive_class
    if scores.shape != truth.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0:
        raise ValueError(f"class {positive_class} is absent")
    if n_neg == 0:
        raise ValueError(f"class {positive_class} covers every sample")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = truth[order]
    last_of_group = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tp = np.cumsum(t)[last_of_group]
    fp = np.cumsum(~t)[last_of_group]
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, s[last_of_group], auc)
