"""Masked color-histogram features and the labeled feature table."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imaging

__all__ = [
    "CLASS_NAMES",
    "EmptyRetina",
    "FeatureTable",
    "LabeledSample",
    "PipelineConfig",
    "TableFormatError",
    "extract_features",
    "masked_histogram",
    "preprocess",
    "read_table",
    "square_features",
    "write_table",
]

N_BINS = 256
N_FEATURES = 3 * N_BINS
CLASS_NAMES = ("No", "Mi", "Mo", "Se", "Pr")
CLASS_LONG_NAMES = ("No DR", "Mild DR", "Moderate DR", "Severe DR", "Proliferative DR")
_META_COLUMNS = ("sample_id", "origin", "parent_id", "label")
HEADER = list(_META_COLUMNS) + [f"c{i}" for i in range(N_FEATURES)]


class EmptyRetina(ValueError):
    """Raised when a mask leaves no pixel to count."""


class TableFormatError(ValueError):
    """Raised when a feature-cache file fails validation."""


def masked_histogram(image, mask) -> np.ndarray:
    """Count channel intensities over masked pixels.

    Returns 768 int64 counts: red bins 0-255, then green, then blue.
    """
    img = imaging.as_rgb(image)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match image {img.shape[:2]}")
    kept = img[mask]
    if kept.shape[0] == 0:
        raise EmptyRetina("mask selects no retina pixel")
    return np.concatenate(
        [np.bincount(kept[:, c], minlength=N_BINS) for c in range(3)]
    ).astype(np.int64)


@dataclass(frozen=True)
class PipelineConfig:
    resize_side: int = 512
    resize_method: str = "nearest"
    black_threshold: int = 0
    tone_map: imaging.ToneMapParams = field(default_factory=imaging.ToneMapParams)


def preprocess(image, config: PipelineConfig | None = None) -> np.ndarray:
    """Crop to the retina and resize to a ``side x side`` square."""
    config = config or PipelineConfig()
    cropped, _ = imaging.crop_retina(image, threshold=config.black_threshold)
    return imaging.resize(cropped, config.resize_side, config.resize_method)


def square_features(square, config: PipelineConfig | None = None) -> np.ndarray:
    """Mask, tone-map and histogram an already preprocessed square image."""
    config = config or PipelineConfig()
    mask = imaging.compute_retina_mask(square, config.black_threshold)
    if not mask.any():
        raise EmptyRetina("resized crop has no retina pixel")
    mapped = imaging.tone_map(square, mask, config.tone_map)
    return masked_histogram(mapped, mask)


def extract_features(image, config: PipelineConfig | None = None) -> np.ndarray:
    """Crop, resize, mask, tone-map and histogram one retinal image."""
    return square_features(preprocess(image, config), config)


@dataclass(frozen=True)
class LabeledSample:
    sample_id: str
    features: np.ndarray
    label: int
    origin: str = "original"
    parent_id: str = ""

    @property
    def group_id(self) -> str:
        return self.parent_id if self.origin == "augmented" else self.sample_id


@dataclass
class FeatureTable:
    samples: list[LabeledSample] = field(default_factory=list)
    class_names: tuple[str, ...] = CLASS_NAMES

    def __len__(self):
        return len(self.samples)

    def validate(self) -> None:
        ids = [s.sample_id for s in self.samples]
        if len(set(ids)) != len(ids):
            raise TableFormatError("sample ids are not unique")
        known = set(ids)
        n_classes = len(self.class_names)
        for s in self.samples:
            if not 0 <= s.label < n_classes:
                raise TableFormatError(f"{s.sample_id}: label {s.label} out of range")
            if s.origin not in ("original", "augmented"):
                raise TableFormatError(f"{s.sample_id}: unknown origin {s.origin!r}")
            if s.origin == "augmented" and s.parent_id not in known:
                raise TableFormatError(f"{s.sample_id}: parent {s.parent_id!r} not in table")
            if np.any(np.asarray(s.features) < 0):
                raise TableFormatError(f"{s.sample_id}: negative count")

    @property
    def X(self) -> np.ndarray:
        if not self.samples:
            return np.zeros((0, N_FEATURES))
        return np.vstack([np.asarray(s.features, dtype=np.float64) for s in self.samples])

    @property
    def y(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=np.int64)

    @property
    def groups(self) -> list[str]:
        return [s.group_id for s in self.samples]

    def matrix(self, normalize: bool = False) -> np.ndarray:
        """Feature matrix; ``normalize`` divides each block by its pixel count."""
        X = self.X
        if normalize and len(X):
            per_block = X[:, :N_BINS].sum(axis=1, keepdims=True)
            X = X / np.where(per_block > 0, per_block, 1.0)
        return X

    def class_counts(self) -> list[int]:
        return np.bincount(self.y, minlength=len(self.class_names)).tolist()

    def subset(self, indices) -> "FeatureTable":
        return FeatureTable([self.samples[i] for i in indices], self.class_names)


def write_table(table: FeatureTable, path) -> None:
    """Write the feature cache CSV (UTF-8, LF line endings)."""
    table.validate()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for s in table.samples:
        counts = np.asarray(s.features)
        if counts.shape != (N_FEATURES,):
            raise TableFormatError(f"{s.sample_id}: expected {N_FEATURES} counts")
        writer.writerow([s.sample_id, s.origin, s.parent_id, s.label, *counts.astype(np.int64).tolist()])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def read_table(path, class_names=CLASS_NAMES) -> FeatureTable:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise TableFormatError(f"{path}: unexpected header")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(HEADER):
                raise TableFormatError(f"{path}:{lineno}: expected {len(HEADER)} columns, got {len(row)}")
            sample_id, origin, parent_id, label = row[:4]
            try:
                counts = np.array([int(v) for v in row[4:]], dtype=np.int64)
                label = int(label)
            except ValueError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from exc
            if np.any(counts < 0):
                raise TableFormatError(f"{path}:{lineno}: negative count")
            if not 0 <= label < len(class_names):
                raise TableFormatError(f"{path}:{lineno}: label {label} out of range")
            samples.append(LabeledSample(sample_id, counts, label, origin, parent_id))
    table = FeatureTable(samples, tuple(class_names))
    table.validate()
    return table
