"""
Per-class precision, recall and F1 from a confusion matrix
==========================================================

The published aggregated 10-fold confusion matrix for five severity grades
reproduces the published per-class table exactly.
"""

import numpy as np

from retina_et import evaluation
from retina_et.evaluation import ConfusionMatrix

names = ("No", "Mi", "Mo", "Se", "Pr")
counts = np.array([
    [4133, 31, 113, 6, 19],
    [31, 3809, 78, 1, 17],
    [265, 370, 1588, 113, 147],
    [12, 5, 58, 2075, 18],
    [7, 19, 115, 16, 3104],
])
cm = ConfusionMatrix(counts, names)
print(f"{cm.total} predictions, accuracy {cm.accuracy():.2f}%")

metrics = evaluation.precision_recall_f1(cm)
print("class  precision  recall     f1")
for name, p, r, f in metrics.rows():
    print(f"{name:7s}{p:9.2f}{r:9.2f}{f:8.2f}")

# moderate cases leak mostly into mild and no-DR predictions
mo = names.index("Mo")
print("Mo row:", dict(zip(names, counts[mo].tolist())))
