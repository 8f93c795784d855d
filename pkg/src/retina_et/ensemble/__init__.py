from .criteria import score_counts, split_score
from .forest import (
    MAX_FEATURES_MODES,
    ExtraTreesModel,
    HyperParams,
    OobEstimate,
    OobUndefined,
    kernel_predict_proba,
    kernel_weights,
    n_candidates,
    oob_error,
    oob_estimate,
    predict,
    predict_proba,
    train,
    tree_rng,
)
from .serialize import load_model, save_model
from .tree import Tree

__all__ = [
    "MAX_FEATURES_MODES",
    "ExtraTreesModel",
    "HyperParams",
    "OobEstimate",
    "OobUndefined",
    "Tree",
    "kernel_predict_proba",
    "kernel_weights",
    "load_model",
    "n_candidates",
    "oob_error",
    "oob_estimate",
    "predict",
    "predict_proba",
    "save_model",
    "score_counts",
    "split_score",
    "train",
    "tree_rng",
]
