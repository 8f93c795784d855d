"""Extremely randomized trees: training, prediction, kernel weights, OOB error.

Class probabilities are averaged across trees with exact integer
arithmetic and rounded once, so every path that computes the same
mathematical quantity (tree averaging, kernel weighting, OOB subsets)
produces bit-identical floats.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .tree import Tree, grow_tree

logger = logging.getLogger(__name__)

MAX_FEATURES_MODES = ("all", "sqrt", "log2")


class OobUndefined(ValueError):
    """Raised when OOB error is requested from a model trained without bootstrap."""


@dataclass(frozen=True)
class HyperParams:
    n_estimators: int = 200
    max_features: str = "log2"
    n_min: int = 2
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.n_min < 2:
            raise ValueError("n_min must be >= 2")
        if self.max_features not in MAX_FEATURES_MODES:
            raise ValueError(f"max_features must be one of {MAX_FEATURES_MODES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)


def n_candidates(mode: str, n_features: int) -> int:
    """Number of attributes examined at each split."""
    if mode == "all":
        return n_features
    if mode == "sqrt":
        return max(1, round(math.sqrt(n_features)))
    if mode == "log2":
        return max(1, round(math.log2(n_features)))
    raise ValueError(f"unknown max_features mode {mode!r}")


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Independent generator for tree ``tree_index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(tree_index,)))


@dataclass
class ExtraTreesModel:
    trees: list[Tree]
    params: HyperParams
    n_classes: int
    feature_count: int
    train_labels: np.ndarray
    inbag_counts: np.ndarray | None  # (n_trees, n_train) multiplicities
    class_names: tuple[str, ...] = ()

    @property
    def n_train(self) -> int:
        return len(self.train_labels)

    def _check(self, X) -> tuple[np.ndarray, bool]:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.feature_count:
            raise ValueError(f"expected {self.feature_count} features, got {X.shape[1]}")
        return X, single

    def leaf_indices(self, X) -> np.ndarray:
        """``(n_samples, n_trees)`` leaf reached in each tree."""
        X, _ = self._check(X)
        return np.column_stack([t.apply(X) for t in self.trees])


def _fit_one(X, y, n_classes, params: HyperParams, k: int, t: int):
    rng = tree_rng(params.seed, t)
    n = len(X)
    if params.bootstrap:
        inbag = np.sort(rng.integers(0, n, size=n))
    else:
        inbag = np.arange(n)
    tree = grow_tree(X, y, inbag, n_classes, k, params.n_min, rng)
    return tree, np.bincount(inbag, minlength=n)


def train(X, y, params: HyperParams | None = None, n_classes: int | None = None,
          class_names=(), n_jobs: int = 1) -> ExtraTreesModel:
    """Fit an extremely randomized trees ensemble.

    The result depends only on ``(X, y, params)``; ``n_jobs`` changes how
    many threads grow trees, never what they grow.
    """
    params = params or HyperParams()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one row per label")
    if len(X) < 2:
        raise ValueError("need at least two training samples")
    if X.shape[1] < 1:
        raise ValueError("need at least one feature")
    if y.min() < 0:
        raise ValueError("labels must be non-negative class indices")
    if len(np.unique(y)) < 2:
        raise ValueError("training data holds a single class; refusing a degenerate classifier")
    if n_classes is None:
        n_classes = max(len(class_names), int(y.max()) + 1)
    if y.max() >= n_classes:
        raise ValueError("label exceeds n_classes")

    k = n_candidates(params.max_features, X.shape[1])
    if n_jobs is None or n_jobs < 1:
        n_jobs = os.cpu_count() or 1

    def fit(t):
        return _fit_one(X, y, n_classes, params, k, t)

    if n_jobs == 1:
        fitted = [fit(t) for t in range(params.n_estimators)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            fitted = list(pool.map(fit, range(params.n_estimators)))

    trees = [tree for tree, _ in fitted]
    inbag = np.vstack([counts for _, counts in fitted]) if params.bootstrap else None
    return ExtraTreesModel(trees, params, n_classes, X.shape[1], y.copy(), inbag, tuple(class_names))


def _exact_mean(counts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Correctly rounded ``mean_t(counts[t] / sizes[t])``.

    Uses a common denominator over the distinct leaf sizes so the whole sum
    is exact in Python integers; int / int division rounds once.
    """
    n_trees = len(sizes)
    distinct = np.unique(sizes)
    common = math.lcm(*(int(s) for s in distinct))
    numer = [0] * counts.shape[1]
    for s in distinct:
        grouped = counts[sizes == s].sum(axis=0)
        scale = common // int(s)
        for c, v in enumerate(grouped.tolist()):
            numer[c] += v * scale
    denom = common * n_trees
    return np.array([v / denom for v in numer])


def _proba_from_leaves(model: ExtraTreesModel, leaves: np.ndarray, use=None) -> np.ndarray:
    out = np.empty((len(leaves), model.n_classes))
    trees = model.trees
    for i, row in enumerate(leaves):
        tree_ids = np.arange(len(trees)) if use is None else np.flatnonzero(use[i])
        counts = np.vstack([trees[t].value[row[t]] for t in tree_ids])
        out[i] = _exact_mean(counts, counts.sum(axis=1))
    return out


def predict_proba(model: ExtraTreesModel, X) -> np.ndarray:
    """Mean over trees of each reached leaf's class-frequency distribution."""
    X, single = model._check(X)
    proba = _proba_from_leaves(model, model.leaf_indices(X))
    return proba[0] if single else proba


def predict(model: ExtraTreesModel, X) -> np.ndarray | int:
    """Most probable class; ties go to the lowest class index."""
    proba = predict_proba(model, X)
    if proba.ndim == 1:
        return int(np.argmax(proba))
    return np.argmax(proba, axis=1)


def kernel_weights(model: ExtraTreesModel, x, exact: bool = False):
    """Weight of every training sample in the prediction at ``x``.

    Sample ``i`` receives ``(1/N_t) * sum_t m_ti / |leaf_t(x)|`` where
    ``m_ti`` is its in-bag multiplicity in tree ``t`` when it shares the leaf
    reached by ``x``.  With ``exact=True`` the weights are ``Fraction``s.
    """
    X, single = model._check(x)
    if not single and len(X) != 1:
        raise ValueError("kernel_weights takes a single probe")
    leaves = model.leaf_indices(X)[0]
    n_trees = len(model.trees)
    weights = [Fraction(0)] * model.n_train
    for t, tree in enumerate(model.trees):
        if tree.sample_leaf is None:
            raise ValueError("model does not retain leaf membership")
        members = np.flatnonzero(tree.sample_leaf == leaves[t])
        mult = (model.inbag_counts[t, members] if model.inbag_counts is not None
                else np.ones(len(members), dtype=np.int64))
        size = int(mult.sum())
        for i, m in zip(members.tolist(), mult.tolist()):
            weights[i] += Fraction(m, size * n_trees)
    if exact:
        return weights
    return np.array([float(w) for w in weights])


def kernel_predict_proba(model: ExtraTreesModel, x) -> np.ndarray:
    """Class distribution as a kernel-weighted sum of training labels."""
    weights = kernel_weights(model, x, exact=True)
    per_class = [Fraction(0)] * model.n_classes
    for w, label in zip(weights, model.train_labels.tolist()):
        per_class[label] += w
    return np.array([float(p) for p in per_class])


class OobEstimate(NamedTuple):
    error: float
    n_scored: int
    n_skipped: int


def oob_estimate(model: ExtraTreesModel, X, y) -> OobEstimate:
    """Out-of-bag error over the training set the model was fit on."""
    if not model.params.bootstrap or model.inbag_counts is None:
        raise OobUndefined("OOB error is undefined without bootstrap sampling")
    X, _ = model._check(X)
    y = np.asarray(y, dtype=np.int64)
    if len(X) != model.n_train or not np.array_equal(y, model.train_labels):
        raise ValueError("OOB error must be computed on the model's own training data")
    out_of_bag = (model.inbag_counts == 0).T  # (n_train, n_trees)
    scored = np.flatnonzero(out_of_bag.any(axis=1))
    n_skipped = model.n_train - len(scored)
    if n_skipped:
        logger.info("%d samples were in bag for every tree and are skipped", n_skipped)
    if len(scored) == 0:
        return OobEstimate(float("nan"), 0, n_skipped)
    leaves = model.leaf_indices(X[scored])
    proba = _proba_from_leaves(model, leaves, use=out_of_bag[scored])
    wrong = np.argmax(proba, axis=1) != y[scored]
    return OobEstimate(float(wrong.mean()), len(scored), n_skipped)


def oob_error(model: ExtraTreesModel, X, y) -> float:
    return oob_estimate(model, X, y).error
