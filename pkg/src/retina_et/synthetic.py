"""Seeded synthetic data for tests and demos."""

from __future__ import annotations

import numpy as np

from .features import CLASS_NAMES, FeatureTable, LabeledSample


def separable_classes(n_per_class=200, n_classes=5, n_features=32, spread=4.0, seed=0):
    """Gaussian blobs around class-indexed mean vectors.

    Class ``c`` has mean ``spread`` on every feature ``j`` with
    ``j % n_classes == c`` and 0 elsewhere, unit variance.
    """
    rng = np.random.default_rng(seed)
    means = np.zeros((n_classes, n_features))
    for c in range(n_classes):
        means[c, c::n_classes] = spread
    y = np.repeat(np.arange(n_classes), n_per_class)
    X = means[y] + rng.standard_normal((len(y), n_features))
    return X, y


def as_table(X, y, class_names=CLASS_NAMES, prefix="s") -> FeatureTable:
    samples = [LabeledSample(f"{prefix}{i:05d}", np.asarray(x), int(label))
               for i, (x, label) in enumerate(zip(X, y))]
    return FeatureTable(samples, tuple(class_names))


def fundus_image(size=96, radius=None, crop_rows=0, seed=0) -> np.ndarray:
    """Reddish disc on a black background, optionally clipped top and bottom."""
    rng = np.random.default_rng(seed)
    radius = radius or size // 2 - 4
    yy, xx = np.mgrid[:size, :size]
    inside = (yy - size // 2) ** 2 + (xx - size // 2) ** 2 <= radius ** 2
    img = np.zeros((size, size, 3), dtype=np.uint8)
    base = np.array([180, 90, 40]) + rng.integers(-30, 30, size=3)
    noise = rng.integers(-25, 25, size=(size, size, 3))
    img[inside] = np.clip(base + noise[inside], 1, 255)
    if crop_rows:
        img[:crop_rows] = 0
        img[size - crop_rows:] = 0
    return img
