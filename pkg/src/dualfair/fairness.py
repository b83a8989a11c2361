"""Label-bias removal and fairness/performance measurement.

A point is "biased" when a trained model predicts different labels for it in
different counterfactual worlds (its sensitive codes swapped, everything
else untouched). Situation testing drops biased points from the training
data; the Alternate World Index (AWI) is the biased fraction of a dataset,
reported at 10x scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DualFairError, ModelError
from .model import ClassifierModel, FitConfig, fit, predict_label
from .tabular import Dataset
from .worlds import SensitiveSpec, enumerate_worlds, sensitive_column_indices


@dataclass(frozen=True)
class ProbeResult:
    row_index: int
    predictions: tuple  # one label per world, in world order
    is_biased: bool


@dataclass(frozen=True)
class PerformanceMetrics:
    accuracy: float
    precision: float
    recall: float
    false_alarm: float
    f1: float
    confusion: tuple  # (TP, FP, TN, FN)
    undefined: tuple = ()  # metric names whose denominator was zero


@dataclass(frozen=True)
class AwiScore:
    biased_points: int
    total_points: int

    @property
    def raw(self) -> float:
        return self.biased_points / self.total_points

    @property
    def reported(self) -> float:
        return 10.0 * self.raw


def _world_predictions(model: ClassifierModel, X: np.ndarray, worlds,
                       sensitive_cols) -> np.ndarray:
    """Label matrix of shape (n_worlds, n_rows): row i = predictions with
    every sensitive code forced to world i."""
    preds = np.empty((len(worlds), X.shape[0]), dtype=np.int64)
    for i, key in enumerate(worlds):
        swapped = X.copy()
        swapped[:, sensitive_cols] = key
        preds[i] = predict_label(model, swapped)
    return preds


def biased_mask(model: ClassifierModel, X: np.ndarray, worlds,
                sensitive_cols) -> np.ndarray:
    preds = _world_predictions(model, X, worlds, sensitive_cols)
    return np.any(preds != preds[0], axis=0)


def probe_point(model: ClassifierModel, row: np.ndarray, worlds,
                sensitive_cols, row_index: int = 0) -> ProbeResult:
    """Predict one feature row under every world; biased iff predictions
    are not all identical. The input row is never mutated."""
    if len(worlds) == 0:
        raise DualFairError("probe_point: empty world list")
    preds = _world_predictions(
        model, np.asarray(row, dtype=np.float64)[None, :], worlds, sensitive_cols
    )[:, 0]
    return ProbeResult(
        row_index=row_index,
        predictions=tuple(int(p) for p in preds),
        is_biased=len(set(preds.tolist())) > 1,
    )


def _feature_sensitive_cols(data: Dataset, spec: SensitiveSpec):
    """Positions of the spec's sensitive columns within the feature matrix."""
    feat = data.feature_indices
    return [feat.index(j) for j in sensitive_column_indices(data, spec)]


def situation_test(train: Dataset, spec: SensitiveSpec,
                   fit_config: FitConfig = FitConfig()) -> Dataset:
    """Drop every training row whose prediction varies across worlds.

    Fits a probe model on the (already balanced) training data itself, then
    removes all biased rows. Raises when nothing would survive.
    """
    model = fit(train, fit_config)
    worlds = enumerate_worlds(spec)
    mask = biased_mask(model, train.features, worlds,
                       _feature_sensitive_cols(train, spec))
    if mask.all():
        raise ModelError("situation testing removed every row; model is bias-saturated")
    return train.with_rows(train.rows[~mask])


def compute_awi(model: ClassifierModel, test: Dataset, spec: SensitiveSpec) -> AwiScore:
    """Biased-point fraction of the test set under the given model."""
    if test.n_rows == 0:
        raise DualFairError("compute_awi: empty test set")
    worlds = enumerate_worlds(spec)
    mask = biased_mask(model, test.features, worlds,
                       _feature_sensitive_cols(test, spec))
    return AwiScore(biased_points=int(mask.sum()), total_points=test.n_rows)


def _ratio(num, den, name, undefined):
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def compute_performance(model: ClassifierModel, test: Dataset) -> PerformanceMetrics:
    """Confusion-matrix metrics of the model on the test set.

    Zero-denominator ratios come back as 0.0 with the metric name flagged in
    ``undefined`` so degenerate folds never abort an experiment.
    """
    if test.n_rows == 0:
        raise DualFairError("compute_performance: empty test set")
    pred = predict_label(model, test.features)
    truth = test.labels.astype(np.int64)
    tp = int(np.sum((pred == 1) & (truth == 1)))
    fp = int(np.sum((pred == 1) & (truth == 0)))
    tn = int(np.sum((pred == 0) & (truth == 0)))
    fn = int(np.sum((pred == 0) & (truth == 1)))
    undefined = []
    accuracy = (tp + tn) / (tp + fp + tn + fn)
    precision = _ratio(tp, tp + fp, "precision", undefined)
    recall = _ratio(tp, tp + fn, "recall", undefined)
    false_alarm = _ratio(fp, fp + tn, "false_alarm", undefined)
    f1 = _ratio(2.0 * precision * recall, precision + recall, "f1", undefined)
    return PerformanceMetrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        false_alarm=false_alarm,
        f1=f1,
        confusion=(tp, fp, tn, fn),
        undefined=tuple(undefined),
    )
