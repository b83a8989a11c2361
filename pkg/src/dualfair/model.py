"""From-scratch binary logistic regression.

Full-batch gradient descent on mean logistic loss plus an L2 ridge term,
weights initialized to zero for determinism. Sensitive columns are part of
the feature vector on purpose: counterfactual probing mutates them and must
be able to move the prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .tabular import Dataset


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.1
    max_epochs: int = 2000
    tolerance: float = 1e-8
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ModelError("learning_rate must be positive")
        if self.max_epochs < 1:
            raise ModelError("max_epochs must be >= 1")
        if self.l2 < 0:
            raise ModelError("l2 must be >= 0")


@dataclass(frozen=True)
class ClassifierModel:
    weights: np.ndarray
    bias: float
    feature_order: tuple
    threshold: float = 0.5

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "feature_order", tuple(self.feature_order))
        if w.shape != (len(self.feature_order),):
            raise ModelError("one weight per feature name required")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.bias):
            raise ModelError("non-finite model parameters")


def loss_and_gradient(weights, bias, X, y, l2):
    """Regularized mean logistic loss and its analytic gradient."""
    z = X @ weights + bias
    p = sigmoid(z)
    # log-loss via logaddexp avoids log(0) at saturated probabilities
    per_row = np.logaddexp(0.0, z) - y * z
    loss = float(np.mean(per_row) + 0.5 * l2 * np.dot(weights, weights))
    resid = p - y
    grad_w = X.T @ resid / X.shape[0] + l2 * weights
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def fit(train: Dataset, config: FitConfig = FitConfig()) -> ClassifierModel:
    """Gradient-descend to a classifier; deterministic for fixed inputs."""
    if train.n_rows == 0:
        raise ModelError("empty training set")
    X = train.features
    y = train.labels
    if len(np.unique(y)) < 2:
        raise ModelError("training labels contain a single class")
    w = np.zeros(X.shape[1])
    b = 0.0
    prev_loss = np.inf
    for _ in range(config.max_epochs):
        loss, grad_w, grad_b = loss_and_gradient(w, b, X, y, config.l2)
        if not np.isfinite(loss):
            raise ModelError("training diverged (non-finite loss)")
        if abs(prev_loss - loss) < config.tolerance:
            break
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
        prev_loss = loss
    feature_names = tuple(train.schema[i].name for i in train.feature_indices)
    return ClassifierModel(weights=w, bias=b, feature_order=feature_names)


def predict_prob(model: ClassifierModel, rows: np.ndarray) -> np.ndarray:
    """sigma(w.x + b); accepts a single feature row or a 2-D batch."""
    rows = np.asarray(rows, dtype=np.float64)
    single = rows.ndim == 1
    X = rows[None, :] if single else rows
    if X.shape[1] != len(model.feature_order):
        raise ModelError(
            f"expected {len(model.feature_order)} features, got {X.shape[1]}"
        )
    p = sigmoid(X @ model.weights + model.bias)
    return p[0] if single else p


def predict_label(model: ClassifierModel, rows: np.ndarray):
    """1 iff probability >= threshold (ties go to the favorable label)."""
    p = predict_prob(model, rows)
    if np.ndim(p) == 0:
        return int(p >= model.threshold)
    return (p >= model.threshold).astype(np.int64)


def save_model(model: ClassifierModel, path) -> None:
    """Flat line-oriented text format: names, weights, bias, threshold."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dualfair-logistic v1\n")
        fh.write(f"threshold {float(model.threshold)!r}\n")
        fh.write(f"bias {float(model.bias)!r}\n")
        for name, w in zip(model.feature_order, model.weights):
            fh.write(f"w {name} {float(w)!r}\n")


def load_model(path) -> ClassifierModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "dualfair-logistic v1":
        raise ModelError(f"{path}: not a dualfair model file")
    threshold = float(lines[1].split()[1])
    bias = float(lines[2].split()[1])
    names, weights = [], []
    for line in lines[3:]:
        _, name, value = line.split()
        names.append(name)
        weights.append(float(value))
    return ClassifierModel(np.array(weights), bias, tuple(names), threshold)
