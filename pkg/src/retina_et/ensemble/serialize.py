"""JSON model files.

Layout::

    {"format": "retina-et-model", "version": 1,
     "params": {...}, "class_names": [...], "n_classes": C, "feature_count": D,
     "train_labels": [...], "inbag_counts": [[...], ...] | null,
     "trees": [{"feature": [...], "threshold": [...], "left": [...],
                "right": [...], "value": [[...], ...], "sample_leaf": [...]}]}

Thresholds are written with ``repr`` precision, so loading reproduces every
cut-point, and therefore every prediction, bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .forest import ExtraTreesModel, HyperParams
from .tree import Tree

FORMAT = "retina-et-model"
VERSION = 1


def model_to_dict(model: ExtraTreesModel) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "params": model.params.to_dict(),
        "class_names": list(model.class_names),
        "n_classes": model.n_classes,
        "feature_count": model.feature_count,
        "train_labels": model.train_labels.tolist(),
        "inbag_counts": None if model.inbag_counts is None else model.inbag_counts.tolist(),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "sample_leaf": t.sample_leaf.tolist(),
            }
            for t in model.trees
        ],
    }


def model_from_dict(data: dict) -> ExtraTreesModel:
    if data.get("format") != FORMAT or data.get("version") != VERSION:
        raise ValueError("not a retina-et model file")
    trees = [
        Tree(
            feature=np.array(t["feature"], dtype=np.int64),
            threshold=np.array(t["threshold"], dtype=np.float64),
            left=np.array(t["left"], dtype=np.int64),
            right=np.array(t["right"], dtype=np.int64),
            value=np.array(t["value"], dtype=np.int64).reshape(len(t["feature"]), data["n_classes"]),
            sample_leaf=np.array(t["sample_leaf"], dtype=np.int64),
        )
        for t in data["trees"]
    ]
    inbag = data["inbag_counts"]
    return ExtraTreesModel(
        trees=trees,
        params=HyperParams(**data["params"]),
        n_classes=data["n_classes"],
        feature_count=data["feature_count"],
        train_labels=np.array(data["train_labels"], dtype=np.int64),
        inbag_counts=None if inbag is None else np.array(inbag, dtype=np.int64),
        class_names=tuple(data["class_names"]),
    )


def save_model(model: ExtraTreesModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), separators=(",", ":")), encoding="utf-8")


def load_model(path) -> ExtraTreesModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
