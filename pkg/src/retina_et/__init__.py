"""Diabetic-retinopathy grading from retinal color histograms with extremely randomized trees."""

from . import ensemble, evaluation, features, imaging

__version__ = "0.1.0"

__all__ = ["ensemble", "evaluation", "features", "imaging"]
