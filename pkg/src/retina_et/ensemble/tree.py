"""A single extremely randomized tree stored as flat node arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import score_counts

LEAF = -1


@dataclass
class Tree:
    """Flat binary tree.

    ``feature[i] == -1`` marks node ``i`` as a leaf.  Internal nodes send a
    sample left when ``x[feature] < threshold``.  ``value`` holds per-class
    in-bag counts for every node.  ``sample_leaf[j]`` is the leaf holding
    training sample ``j``, or -1 when ``j`` was out of bag.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    sample_leaf: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        active = self.feature[node] != LEAF
        while active.any():
            r = rows[active]
            n = node[active]
            go_left = X[r, self.feature[n]] < self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] != LEAF
        return node

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())


def _draw_cuts(rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    cuts = rng.uniform(lo, hi)
    # uniform() is half-open and may round onto an endpoint; keep the interval open
    bad = (cuts <= lo) | (cuts >= hi)
    if not bad.any():
        return cuts
    for j in np.flatnonzero(bad):
        while not lo[j] < cuts[j] < hi[j]:
            cuts[j] = rng.uniform(lo[j], hi[j])
    return cuts


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    inbag: np.ndarray,
    n_classes: int,
    n_candidates: int,
    n_min: int,
    rng: np.random.Generator,
) -> Tree:
    """Grow one tree on the rows listed in ``inbag`` (repeats allowed).

    Nodes are expanded depth first, left child before right.  At each
    splittable node the generator is consumed in a fixed order: the
    attribute subset, then one cut-point per chosen attribute in ascending
    attribute order.
    """
    feature, threshold, left, right, value = [LEAF], [0.0], [LEAF], [LEAF], [None]
    sample_leaf = np.full(len(X), LEAF, dtype=np.int64)
    stack = [(0, np.asarray(inbag, dtype=np.int64))]

    while stack:
        node, idx = stack.pop()
        labels = y[idx]
        counts = np.bincount(labels, minlength=n_classes)
        value[node] = counts

        split = None
        if len(idx) >= n_min and np.count_nonzero(counts) > 1:
            split = _choose_split(X[idx], labels, counts, n_classes, n_candidates, rng)

        if split is None:
            sample_leaf[idx] = node
            continue

        attr, cut, goes_left = split
        feature[node], threshold[node] = attr, cut
        left_id, right_id = len(feature), len(feature) + 1
        left[node], right[node] = left_id, right_id
        for _ in range(2):
            feature.append(LEAF)
            threshold.append(0.0)
            left.append(LEAF)
            right.append(LEAF)
            value.append(None)
        stack.append((right_id, idx[~goes_left]))
        stack.append((left_id, idx[goes_left]))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.vstack(value).astype(np.int64),
        sample_leaf=sample_leaf,
    )


def _choose_split(Xn, labels, counts, n_classes, n_candidates, rng):
    lo = Xn.min(axis=0)
    hi = Xn.max(axis=0)
    usable = np.flatnonzero(hi > lo)
    if usable.size == 0:
        return None
    k = min(n_candidates, usable.size)
    attrs = np.sort(rng.choice(usable, size=k, replace=False))
    cuts = _draw_cuts(rng, lo[attrs], hi[attrs])

    goes_left = Xn[:, attrs] < cuts
    onehot = np.eye(n_classes)[labels]
    left_counts = onehot.T @ goes_left
    right_counts = counts[:, None] - left_counts
    scores = score_counts(left_counts, right_counts)
    # argmax keeps the first maximum, i.e. the lowest attribute index
    best = int(np.argmax(scores))
    return int(attrs[best]), float(cuts[best]), goes_left[:, best]
