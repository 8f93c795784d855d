"""
Extremely randomized trees from scratch
=======================================

Train the ensemble, look at class probabilities, read them back as a
kernel over training samples, and estimate the error out-of-bag.
"""

import tempfile
from pathlib import Path

import numpy as np

from retina_et import ensemble, synthetic
from retina_et.ensemble import HyperParams

X, y = synthetic.separable_classes(n_per_class=60, n_classes=3, n_features=12, spread=1.5, seed=0)
params = HyperParams(n_estimators=100, max_features="log2", n_min=2, bootstrap=True, seed=0)
model = ensemble.train(X, y, params, class_names=("a", "b", "c"))

print("candidate attributes per node:", ensemble.n_candidates(params.max_features, X.shape[1]))
print("mean tree depth:", np.mean([t.depth() for t in model.trees]))

probe = X[0] + 0.3
proba = ensemble.predict_proba(model, probe)
print("class probabilities", proba.round(3), "-> predicted", ensemble.predict(model, probe))

# the same prediction, written as a weighted vote of the training labels
w = ensemble.kernel_weights(model, probe)
top = np.argsort(w)[::-1][:5]
print("heaviest training samples", top, "weights", w[top].round(4))
print("kernel path equals tree average:",
      np.array_equal(ensemble.kernel_predict_proba(model, probe), proba))

est = ensemble.oob_estimate(model, X, y)
print(f"OOB error {est.error:.3f} over {est.n_scored} samples ({est.n_skipped} never out of bag)")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "model.json"
    ensemble.save_model(model, path)
    back = ensemble.load_model(path)
    print("reloaded model agrees:", np.array_equal(ensemble.predict_proba(back, X), ensemble.predict_proba(model, X)))
