"""Small dense classifier (input -> 20 -> 10 -> 1) trained with the penalty loss.

ReLU hidden layers, inverted dropout after each hidden layer, sigmoid output.
Updates are plain mini-batch gradient descent on the batch-mean loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import EmptyDataset, ShapeMismatch
from .fbeta import PrecisionRecall, harmonic_f1
from .knee import KneeConfig, PenaltyModel, config_for, knee_beta_opt
from .loss import (
    BatchPrediction,
    PenaltyWeight,
    batch_precision_recall,
    confusion_counts,
    weighted_bce,
    weighted_bce_grad,
)
from .simulators import LabeledDataset

HIDDEN = (20, 10)
KEEP_PROB = 0.9


@dataclass
class DenseNet:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    def copy(self) -> "DenseNet":
        return DenseNet([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def parameters(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]


def init_net(input_dim: int, seed: int) -> DenseNet:
    """Glorot-uniform weights, zero biases."""
    if input_dim < 1:
        raise ValueError("input_dim must be at least 1")
    rng = np.random.default_rng(seed)
    sizes = (input_dim, *HIDDEN, 1)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return DenseNet(weights, biases)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _check_inputs(net: DenseNet, inputs) -> np.ndarray:
    x = np.asarray(inputs, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ShapeMismatch(f"expected (*, {net.input_dim}) inputs, got {x.shape}")
    return x


def _forward_cache(net, x, training, rng, keep_prob):
    acts = [x]
    masks = []
    h = x
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        pre = h @ w + b
        if i == last:
            return _sigmoid(pre[:, 0]), acts, masks
        h = np.maximum(pre, 0.0)
        if training and keep_prob < 1.0:
            mask = (rng.random(h.shape) < keep_prob) / keep_prob
        else:
            mask = None
        if mask is not None:
            h = h * mask
        masks.append(mask)
        acts.append(h)


def forward(net: DenseNet, inputs, training: bool = False, rng=None, keep_prob: float = KEEP_PROB):
    """Predicted probabilities; dropout masks come from ``rng`` in training mode."""
    x = _check_inputs(net, inputs)
    if training and keep_prob < 1.0 and rng is None:
        raise ValueError("training mode with dropout needs an rng")
    out, _, _ = _forward_cache(net, x, training, rng, keep_prob)
    return out


def _backward(net, acts, masks, out_grad):
    """Parameter gradients given d loss / d pre-activation of the output unit."""
    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    delta = out_grad[:, None]
    for i in range(len(net.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i == 0:
            break
        delta = delta @ net.weights[i].T
        if masks[i - 1] is not None:
            delta = delta * masks[i - 1]
        delta = delta * (acts[i] > 0)
    return grads_w, grads_b


def loss_and_grads(net, inputs, labels, weight: PenaltyWeight, training=False, rng=None,
                   keep_prob: float = KEEP_PROB):
    """Batch-mean weighted loss and its gradients w.r.t. every parameter."""
    x = _check_inputs(net, inputs)
    y = np.asarray(labels, dtype=float).ravel()
    if y.size != x.shape[0]:
        raise ShapeMismatch("one label per input row required")
    out, acts, masks = _forward_cache(net, x, training, rng, keep_prob)
    batch = BatchPrediction(out, y)
    n = y.size
    loss = weighted_bce(batch, weight) / n
    # chain through the sigmoid: df/dz = f (1 - f), evaluated on the clipped f
    f = batch.predictions
    dz = weighted_bce_grad(batch, weight) * f * (1.0 - f) / n
    grads_w, grads_b = _backward(net, acts, masks, dz)
    return loss, grads_w, grads_b, batch


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Baseline:
    """Ordinary cross-entropy (beta_opt^2 = 0)."""


@dataclass(frozen=True)
class Penalty:
    model: PenaltyModel
    knee: KneeConfig | None = None

    @property
    def knee_config(self) -> KneeConfig:
        return self.knee if self.knee is not None else config_for(self.model)


@dataclass(frozen=True)
class FixedPenalty:
    """Constant beta_opt on every batch; a reference path for testing."""

    beta_opt: float = 1.0


LossMode = Union[Baseline, Penalty, FixedPenalty]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 0.5
    seed: int = 0
    loss_mode: LossMode = field(default_factory=Baseline)
    eval_threshold: float = 0.5
    keep_prob: float = KEEP_PROB
    standardize: bool = True

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0 or not self.learning_rate > 0:
            raise ValueError("epochs, batch_size and learning_rate must be positive")


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    train_loss: float
    precision: float
    recall: float
    f1: float
    mean_beta_opt: float
    default_fraction: float


@dataclass
class TrainResult:
    history: list[EpochMetrics]
    net: DenseNet
    step_losses: list[float]

    @property
    def best(self) -> EpochMetrics:
        return max(self.history, key=lambda m: m.f1)

    @property
    def best_f1(self) -> float:
        return self.best.f1


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        scale = x.std(axis=0)
        return cls(x.mean(axis=0), np.where(scale > 0, scale, 1.0))

    def __call__(self, x):
        return (x - self.mean) / self.scale


def batch_beta_opt(mode: LossMode, pr: PrecisionRecall | None) -> tuple[float, bool]:
    """(beta_opt, used_default) for one batch under ``mode``."""
    if isinstance(mode, Baseline):
        return 0.0, False
    if isinstance(mode, FixedPenalty):
        return mode.beta_opt, False
    knee = mode.knee_config
    if pr is None:
        return knee.default_beta, True
    beta, trace = knee_beta_opt(pr, mode.model, knee)
    return beta, trace.used_default


def evaluate(net: DenseNet, data: LabeledDataset, threshold: float = 0.5):
    """((precision, recall) or None, f1) from hard-thresholded predictions."""
    if len(data) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    preds = forward(net, data.features)
    tp, fp, fn, _ = confusion_counts(preds, data.labels, threshold)
    if tp + fp == 0 or tp + fn == 0:
        return None, 0.0
    pr = PrecisionRecall(tp / (tp + fp), tp / (tp + fn))
    return pr, harmonic_f1(pr.precision, pr.recall)


def train(net: DenseNet, train_data: LabeledDataset, val_data: LabeledDataset,
          config: TrainConfig) -> TrainResult:
    """Train ``net`` in place; returns per-epoch validation metrics."""
    if len(train_data) == 0 or len(val_data) == 0:
        raise EmptyDataset("training and validation data must be nonempty")
    for data in (train_data, val_data):
        if data.features.shape[1] != net.input_dim:
            raise ShapeMismatch(f"net expects {net.input_dim} features, data has {data.features.shape[1]}")

    if config.standardize:
        scaler = Standardizer.fit(train_data.features)
        x_train = scaler(train_data.features)
        val = LabeledDataset(scaler(val_data.features), val_data.labels, val_data.columns)
    else:
        x_train = train_data.features
        val = val_data
    y_train = train_data.labels

    rng = np.random.default_rng(config.seed)
    history, step_losses = [], []
    n = len(train_data)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        losses, betas, defaults = [], [], 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            # forward pass first, beta_opt from this batch's own predictions
            out, acts, masks = _forward_cache(net, x_train[idx], True, rng, config.keep_prob)
            batch = BatchPrediction(out, y_train[idx])
            pr = batch_precision_recall(batch, config.eval_threshold)
            beta, used_default = batch_beta_opt(config.loss_mode, pr)
            weight = PenaltyWeight.from_beta(beta)
            m = len(idx)
            loss = weighted_bce(batch, weight) / m
            f = batch.predictions
            dz = weighted_bce_grad(batch, weight) * f * (1.0 - f) / m
            grads_w, grads_b = _backward(net, acts, masks, dz)
            for w, g in zip(net.weights, grads_w):
                w -= config.learning_rate * g
            for b, g in zip(net.biases, grads_b):
                b -= config.learning_rate * g
            losses.append(loss)
            step_losses.append(loss)
            betas.append(beta)
            defaults += used_default
        pr_val, f1 = evaluate(net, val, config.eval_threshold)
        history.append(EpochMetrics(
            epoch=epoch,
            train_loss=float(np.mean(losses)),
            precision=pr_val.precision if pr_val else 0.0,
            recall=pr_val.recall if pr_val else 0.0,
            f1=f1,
            mean_beta_opt=float(np.mean(betas)),
            default_fraction=defaults / len(betas),
        ))
    return TrainResult(history, net, step_losses)
