"""Penalty-weighted binary cross-entropy and batch precision/recall.

The negative-label term is scaled by ``1 / (1 + b)`` when ``1 - f <= 0.5``
and by ``1 + b`` otherwise, where ``b = beta_opt ** 2``. Positive-label terms
are never weighted. Losses are sums over the batch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch, ShapeMismatch
from .fbeta import PrecisionRecall

EPS = 1e-7


@dataclass(frozen=True)
class BatchPrediction:
    predictions: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.predictions, dtype=float).ravel()
        y = np.asarray(self.labels, dtype=float).ravel()
        if f.size == 0 or y.size == 0:
            raise EmptyBatch("batch has no items")
        if f.size != y.size:
            raise ShapeMismatch(f"{f.size} predictions vs {y.size} labels")
        object.__setattr__(self, "predictions", np.clip(f, EPS, 1.0 - EPS))
        object.__setattr__(self, "labels", y)


@dataclass(frozen=True)
class PenaltyWeight:
    beta_opt_sq: float = 0.0

    def __post_init__(self):
        if not self.beta_opt_sq >= 0:
            raise ValueError("beta_opt_sq must be nonnegative")

    @classmethod
    def from_beta(cls, beta_opt: float) -> "PenaltyWeight":
        return cls(beta_opt * beta_opt)


def negative_weights(predictions: np.ndarray, weight: PenaltyWeight) -> np.ndarray:
    """Per-item multiplier applied to the ``log(1 - f)`` term."""
    k = 1.0 + weight.beta_opt_sq
    return np.where(1.0 - predictions <= 0.5, 1.0 / k, k)


def weighted_bce_terms(batch: BatchPrediction, weight: PenaltyWeight) -> np.ndarray:
    f, y = batch.predictions, batch.labels
    w = negative_weights(f, weight)
    return -(y * np.log(f) + (1.0 - y) * np.log1p(-f) * w)


def weighted_bce(batch: BatchPrediction, weight: PenaltyWeight) -> float:
    return float(np.sum(weighted_bce_terms(batch, weight)))


def weighted_bce_grad(batch: BatchPrediction, weight: PenaltyWeight) -> np.ndarray:
    """d loss / d f_i, holding the branch indicator fixed."""
    f, y = batch.predictions, batch.labels
    w = negative_weights(f, weight)
    return np.where(y == 1.0, -1.0 / f, w / (1.0 - f))


def confusion_counts(predictions, labels, threshold: float = 0.5) -> tuple[int, int, int, int]:
    """(TP, FP, FN, TN) with ``prediction >= threshold`` meaning class 1."""
    pred = np.asarray(predictions) >= threshold
    true = np.asarray(labels) == 1
    tp = int(np.count_nonzero(pred & true))
    fp = int(np.count_nonzero(pred & ~true))
    fn = int(np.count_nonzero(~pred & true))
    tn = int(np.count_nonzero(~pred & ~true))
    return tp, fp, fn, tn


def batch_precision_recall(batch: BatchPrediction, threshold: float = 0.5) -> PrecisionRecall | None:
    """Hard-threshold precision and recall, or None when either is undefined."""
    tp, fp, fn, _ = confusion_counts(batch.predictions, batch.labels, threshold)
    if tp + fp == 0 or tp + fn == 0:
        return None
    return PrecisionRecall(tp / (tp + fp), tp / (tp + fn))
