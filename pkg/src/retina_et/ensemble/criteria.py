"""Normalized information gain used to rank random candidate splits."""

from __future__ import annotations

import numpy as np


def _xlogx(a: np.ndarray) -> np.ndarray:
    # a * log2(a) with 0 log 0 = 0; inputs are whole counts so max(a, 1) is exact
    return a * np.log2(np.maximum(a, 1.0))


def score_counts(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Score many splits at once.

    ``left`` and ``right`` are ``(n_classes, n_candidates)`` class-count
    matrices; returns one score per candidate, ``2 I / (H_split + H_class)``
    with base-2 entropies.  Both sides of every candidate must be nonempty.
    """
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    n_left = left.sum(axis=0)
    n_right = right.sum(axis=0)
    n = n_left + n_right
    n_log_n = _xlogx(n)
    side_terms = _xlogx(n_left) + _xlogx(n_right)
    class_terms = _xlogx(left + right).sum(axis=0)
    h_class = (n_log_n - class_terms) / n
    h_split = (n_log_n - side_terms) / n
    info = (n_log_n - class_terms - side_terms
            + _xlogx(left).sum(axis=0) + _xlogx(right).sum(axis=0)) / n
    return np.clip(2.0 * info / (h_split + h_class), 0.0, 1.0)


def split_score(left_labels, right_labels, n_classes: int | None = None) -> float:
    """Normalized information gain of partitioning a node into two label sets."""
    left_labels = np.asarray(left_labels, dtype=np.int64)
    right_labels = np.asarray(right_labels, dtype=np.int64)
    if left_labels.size == 0 or right_labels.size == 0:
        raise ValueError("both sides of a split must be nonempty")
    if n_classes is None:
        n_classes = int(max(left_labels.max(), right_labels.max())) + 1
    left = np.bincount(left_labels, minlength=n_classes)[:, None]
    right = np.bincount(right_labels, minlength=n_classes)[:, None]
    return float(score_counts(left, right)[0])
