from .metrics import ClassMetrics, ConfusionMatrix, confusion_matrix, precision_recall_f1
from .protocols import (
    CvReport,
    HoldoutReport,
    SweepRow,
    cross_validate,
    derive_seed,
    holdout,
    oob_sweep,
)
from .roc import RocCurve, roc_curve
from .splits import FoldAssignment, stratified_holdout, stratified_kfold

__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "CvReport",
    "FoldAssignment",
    "HoldoutReport",
    "RocCurve",
    "SweepRow",
    "confusion_matrix",
    "cross_validate",
    "derive_seed",
    "holdout",
    "oob_sweep",
    "precision_recall_f1",
    "roc_curve",
    "stratified_holdout",
    "stratified_kfold",
]
