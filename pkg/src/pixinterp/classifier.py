"""Linear soft-margin SVM trained by Pegasos-style subgradient descent, and the
confusion-matrix metrics used to report it."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

MODEL_FORMAT_VERSION = 1


class Label(str, enum.Enum):
    BENIGN = "Benign"
    MALIGNANT = "Malignant"

    @classmethod
    def parse(cls, text: str) -> "Label":
        t = text.strip().lower()
        if t in ("b", "benign"):
            return cls.BENIGN
        if t in ("m", "malignant"):
            return cls.MALIGNANT
        raise ValueError(f"unknown label {text!r}")

    @property
    def sign(self) -> int:
        return 1 if self is Label.MALIGNANT else -1


@dataclass(frozen=True)
class Sample:
    features: tuple[float, ...]
    label: Label


@dataclass(frozen=True)
class LinearModel:
    weights: tuple[float, ...]
    bias: float
    feature_means: tuple[float, ...]
    feature_scales: tuple[float, ...]
    trained_on: int
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def to_json(self, **extra) -> str:
        doc = {"format_version": MODEL_FORMAT_VERSION, **asdict(self), **extra}
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        doc = json.loads(text)
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format {doc.get('format_version')!r}")
        return cls(
            weights=tuple(doc["weights"]),
            bias=float(doc["bias"]),
            feature_means=tuple(doc["feature_means"]),
            feature_scales=tuple(doc["feature_scales"]),
            trained_on=int(doc["trained_on"]),
            params=doc.get("params", {}),
        )

    def score(self, features) -> float:
        x = np.asarray(features, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} features, got shape {x.shape}")
        z = (x - np.asarray(self.feature_means)) / np.asarray(self.feature_scales)
        return float(np.dot(self.weights, z) + self.bias)


def train_svm(
    samples: list[Sample], regularization: float = 0.01, epochs: int = 200, seed: int = 0
) -> LinearModel:
    """Minimize ``lam/2 (|w|^2 + b^2) + mean hinge`` with step ``1/(lam t)``.

    Features are standardized first. The bias is treated as the weight of a
    constant feature, so it is regularized and shrunk with ``w``. Leaving it
    unregularized lets the huge early steps (``1/lam`` at ``t = 1``) throw it far
    off, and it never fully recovers. With zero-mean features the shrinkage
    costs nothing.

    Samples are visited in their given order every epoch, so the result is
    reproducible bit for bit. ``seed`` is recorded but no randomness is drawn.
    """
    if not samples:
        raise ValueError("no training samples")
    dims = {len(s.features) for s in samples}
    if len(dims) != 1:
        raise ValueError(f"inconsistent feature dimensions {sorted(dims)}")
    if len({s.label for s in samples}) < 2:
        raise ValueError("training needs samples of both classes")
    if not regularization > 0 or epochs < 1:
        raise ValueError("regularization must be positive and epochs >= 1")

    X = np.asarray([s.features for s in samples], dtype=float)
    y = np.asarray([s.label.sign for s in samples], dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    Z = (X - means) / scales

    lam = regularization
    Z = np.hstack([Z, np.ones((Z.shape[0], 1))])
    w = np.zeros(Z.shape[1])
    t = 0
    for _ in range(epochs):
        for zi, yi in zip(Z, y):
            t += 1
            eta = 1.0 / (lam * t)
            violated = yi * (w @ zi) < 1
            w *= 1 - eta * lam
            if violated:
                w += eta * yi * zi
    w, b = w[:-1], float(w[-1])
    return LinearModel(
        weights=tuple(float(v) for v in w),
        bias=float(b),
        feature_means=tuple(float(v) for v in means),
        feature_scales=tuple(float(v) for v in scales),
        trained_on=len(samples),
        params={"regularization": lam, "epochs": epochs, "seed": seed},
    )


def predict(model: LinearModel, features) -> tuple[Label, float]:
    s = model.score(features)
    # a zero score is called benign
    return (Label.MALIGNANT if s > 0 else Label.BENIGN), s


def decision_threshold_1d(model: LinearModel) -> float:
    """Raw-feature value where a one-feature model's score crosses zero."""
    if model.dim != 1 or model.weights[0] == 0:
        raise ValueError("only defined for one-feature models with nonzero weight")
    return model.feature_means[0] - model.bias * model.feature_scales[0] / model.weights[0]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class Metrics:
    """Percentages; ``None`` where the denominator is zero."""

    sensitivity: float | None
    specificity: float | None
    accuracy: float | None
    precision: float | None


def confusion_matrix(predictions: list[Label], truth: list[Label]) -> ConfusionMatrix:
    if len(predictions) != len(truth):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(truth)} labels")
    if not truth:
        raise ValueError("no predictions to score")
    counts = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for p, t in zip(predictions, truth):
        if p is Label.MALIGNANT:
            counts["tp" if t is Label.MALIGNANT else "fp"] += 1
        else:
            counts["fn" if t is Label.MALIGNANT else "tn"] += 1
    return ConfusionMatrix(**counts)


def _pct(num: int, den: int) -> float | None:
    return 100.0 * num / den if den else None


def compute_metrics(cm: ConfusionMatrix) -> Metrics:
    return Metrics(
        sensitivity=_pct(cm.tp, cm.tp + cm.fn),
        specificity=_pct(cm.tn, cm.tn + cm.fp),
        accuracy=_pct(cm.tp + cm.tn, cm.total),
        precision=_pct(cm.tp, cm.tp + cm.fp),
    )


def metrics_table(cm: ConfusionMatrix, metrics: Metrics, scheme: str = "SVM") -> str:
    head = ["Scheme", "TN", "TP", "FP", "FN", "Sensitivity (%)", "Specificity (%)",
            "Accuracy (%)", "Precision (%)"]

    def fmt(v):
        return "n/a" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.2f}"

    row = [scheme, str(cm.tn), str(cm.tp), str(cm.fp), str(cm.fn),
           fmt(metrics.sensitivity), fmt(metrics.specificity),
           fmt(metrics.accuracy), fmt(metrics.precision)]
    widths = [max(len(h), len(r)) for h, r in zip(head, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip(),
             "  ".join(r.ljust(w) for r, w in zip(row, widths)).rstrip()]
    return "\n".join(lines) + "\n"


def stratified_split(labels: list[Label], train_fraction: float = 0.7, seed: int = 0):
    """Indices for a seeded per-class shuffle split."""
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in (Label.BENIGN, Label.MALIGNANT):
        idx = [i for i, lab in enumerate(labels) if lab is cls]
        idx = [idx[i] for i in rng.permutation(len(idx))]
        cut = int(round(train_fraction * len(idx)))
        train += idx[:cut]
        test += idx[cut:]
    return sorted(train), sorted(test)
