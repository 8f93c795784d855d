from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FoldAssignment:
    sample_ids: tuple[str, ...]
    folds: np.ndarray  # fold index per sample, aligned with sample_ids
    k: int

    @property
    def fold_of(self) -> dict[str, int]:
        return dict(zip(self.sample_ids, self.folds.tolist()))

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)


def _class_groups(labels, groups):
    """Map class -> sorted list of group keys, and group key -> member indices."""
    members = defaultdict(list)
    group_label = {}
    for i, (label, g) in enumerate(zip(labels, groups)):
        if group_label.setdefault(g, label) != label:
            raise ValueError(f"group {g!r} mixes labels {group_label[g]} and {label}")
        members[g].append(i)
    by_class = defaultdict(list)
    for g, label in group_label.items():
        by_class[label].append(g)
    return {c: sorted(gs) for c, gs in sorted(by_class.items())}, members


def stratified_kfold(labels, k: int, seed: int = 0, groups=None, sample_ids=None) -> FoldAssignment:
    """Assign samples to ``k`` folds with per-class balance.

    Within each class, groups (a parent image and its augmented copies, or
    single samples when ``groups`` is None) are shuffled with ``seed`` and
    dealt round-robin.  The dealing position carries over from one class to
    the next so fold sizes also stay even overall.
    """
    labels = [int(v) for v in labels]
    if k < 2:
        raise ValueError("k must be >= 2")
    if groups is None:
        groups = [str(i) for i in range(len(labels))]
    sample_ids = tuple(sample_ids) if sample_ids is not None else tuple(str(i) for i in range(len(labels)))
    by_class, members = _class_groups(labels, groups)
    for c, gs in by_class.items():
        if len(gs) < k:
            raise ValueError(f"class {c} has {len(gs)} groups, fewer than k={k}")

    rng = np.random.default_rng(seed)
    folds = np.full(len(labels), -1, dtype=np.int64)
    position = 0
    for c, gs in by_class.items():
        for g in (gs[i] for i in rng.permutation(len(gs))):
            folds[members[g]] = position % k
            position += 1
    return FoldAssignment(sample_ids, folds, k)


def stratified_holdout(labels, test_fraction: float = 0.3, seed: int = 0, groups=None):
    """Split indices into ``(train, test)`` keeping class proportions."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    labels = [int(v) for v in labels]
    if groups is None:
        groups = [str(i) for i in range(len(labels))]
    by_class, members = _class_groups(labels, groups)
    rng = np.random.default_rng(seed)
    is_test = np.zeros(len(labels), dtype=bool)
    for c, gs in by_class.items():
        n_test = int(round(test_fraction * len(gs)))
        if len(gs) >= 2:
            n_test = min(max(n_test, 1), len(gs) - 1)
        for i in rng.permutation(len(gs))[:n_test]:
            is_test[members[gs[i]]] = True
    return np.flatnonzero(~is_test), np.flatnonzero(is_test)
