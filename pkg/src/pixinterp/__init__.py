"""Tumor-shape irregularity from interpolated-pixel counts.

A segmented mass is summarized by its radial border signature; the signature
maxima span a polygon, the polygon's centroid and mean vertex distance give a
circle, and the number of pixels needed to fill the tumor out to that circle
is the feature a linear SVM uses to separate benign from malignant masses.
"""
from .classifier import Label, LinearModel, Sample, compute_metrics, confusion_matrix, predict, train_svm
from .interp import count_interpolated_pixels, rasterize_disk
from .pipeline import Analysis, RunConfig, analyze_mask, segment

__all__ = [
    "Analysis",
    "Label",
    "LinearModel",
    "RunConfig",
    "Sample",
    "analyze_mask",
    "compute_metrics",
    "confusion_matrix",
    "count_interpolated_pixels",
    "predict",
    "rasterize_disk",
    "segment",
    "train_svm",
]
