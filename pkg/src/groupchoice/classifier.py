"""Multinomial logistic regression trained by deterministic full-batch
gradient descent with backtracking line search.

The objective is mean cross-entropy plus an L2 penalty ``|W|^2 / (2 C N)`` on
the weights (bias unpenalized), with N the number of training examples. This
is the conventional inverse-regularization parameterization of multinomial
logistic regression solvers (equivalent to minimizing ``|W|^2 / 2 + C *
summed cross-entropy``), so C grids such as [0.1, 50] carry their usual
meaning. The objective is convex and training starts from zero weights, so
identical inputs give bitwise-identical models.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

ARMIJO_C = 1e-4
MIN_STEP = 1e-12
MAX_STEP = 1e6
GRAD_EPS = 1e-30


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings; ``c`` is the inverse regularization strength."""

    c: float = 1.0
    max_iterations: int = 300
    tolerance: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class GridSearchSpec:
    candidates: tuple[float, ...] = ()
    inner_folds: int = 3

    def __post_init__(self):
        candidates = tuple(float(c) for c in self.candidates)
        if not candidates:
            raise ValueError("empty candidate list")
        if any(c <= 0 for c in candidates):
            raise ValueError("all C candidates must be positive")
        if self.inner_folds < 2:
            raise ValueError("inner_folds must be at least 2")
        object.__setattr__(self, "candidates", candidates)


def default_grid(inner_folds: int = 3) -> GridSearchSpec:
    """20 log-spaced C values in [0.1, 50]; the desk-scale default."""
    return GridSearchSpec(tuple(np.geomspace(0.1, 50.0, 20)), inner_folds)


def full_grid(inner_folds: int = 3) -> GridSearchSpec:
    """The full 500-value grid 0.1, 0.2, ..., 50.0."""
    return GridSearchSpec(tuple(np.arange(1, 501) / 10.0), inner_folds)


@dataclass(frozen=True, eq=False)
class SoftmaxModel:
    """Weights (n_features x n_classes), bias, and the class label order."""

    weights: np.ndarray
    bias: np.ndarray
    class_labels: np.ndarray
    c: float = 1.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        bias = np.array(self.bias, dtype=float)
        labels = np.array(self.class_labels, dtype=int)
        if weights.ndim != 2 or bias.ndim != 1 or weights.shape[1] != bias.shape[0]:
            raise ValueError("inconsistent weight/bias shapes")
        if labels.shape[0] != bias.shape[0]:
            raise ValueError("class_labels length must equal n_classes")
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise ValueError("model parameters must be finite")
        for arr in (weights, bias, labels):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "class_labels", labels)

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    @property
    def n_classes(self) -> int:
        return self.weights.shape[1]


def _stack_examples(examples) -> tuple[np.ndarray, np.ndarray]:
    if len(examples) == 0:
        raise ValueError("need at least one training example")
    features = np.asarray([np.asarray(x, dtype=float) for x, _ in examples])
    labels = np.asarray([int(y) for _, y in examples])
    if features.ndim != 2:
        raise ValueError("feature vectors must share one length")
    if not np.all(np.isfinite(features)):
        raise ValueError("non-finite feature value")
    n_classes = features.shape[1]
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError("class label outside 0..n_classes-1")
    return features, labels


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _objective(X, Y, W, b, c):
    logp = _log_softmax(X @ W + b)
    data_loss = -(logp * Y).sum() / X.shape[0]
    return data_loss + (W * W).sum() / (2.0 * c * X.shape[0]), data_loss


def _gradient(X, Y, W, b, c):
    P = np.exp(_log_softmax(X @ W + b))
    G = (P - Y) / X.shape[0]
    return X.T @ G + W / (c * X.shape[0]), G.sum(axis=0)


def loss_and_gradient(X, Y, W, b, c):
    """Regularized loss with its analytic gradient; exposed for testing
    against finite differences."""
    loss, _ = _objective(X, Y, W, b, c)
    gW, gb = _gradient(X, Y, W, b, c)
    return loss, gW, gb


def train(examples: Sequence, cfg: TrainConfig) -> SoftmaxModel:
    """Fit a softmax model on (feature vector, class label) pairs.

    Minimizes mean cross-entropy plus ``|W|^2 / (2 c N)`` by full-batch
    gradient descent from zero weights; each step is accepted only if it
    satisfies an Armijo decrease, so the loss never increases. Stops when an
    accepted step improves the loss by less than ``cfg.tolerance``.
    """
    X, y = _stack_examples(examples)
    n_classes = X.shape[1]
    Y = np.zeros((len(y), n_classes))
    Y[np.arange(len(y)), y] = 1.0
    W = np.zeros((X.shape[1], n_classes))
    b = np.zeros(n_classes)
    loss, _ = _objective(X, Y, W, b, cfg.c)
    step = 1.0
    for _ in range(cfg.max_iterations):
        gW, gb = _gradient(X, Y, W, b, cfg.c)
        grad_sq = (gW * gW).sum() + (gb * gb).sum()
        if grad_sq <= GRAD_EPS:
            break
        accepted = False
        while step >= MIN_STEP:
            W_new = W - step * gW
            b_new = b - step * gb
            loss_new, _ = _objective(X, Y, W_new, b_new, cfg.c)
            if loss_new <= loss - ARMIJO_C * step * grad_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = loss - loss_new
        W, b, loss = W_new, b_new, loss_new
        step = min(step * 2.0, MAX_STEP)
        if improvement < cfg.tolerance:
            break
    return SoftmaxModel(W, b, np.arange(n_classes), float(cfg.c))


def predict_proba(model: SoftmaxModel, features: np.ndarray) -> np.ndarray:
    """Class probabilities for one feature vector (positive, summing to 1)."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise ValueError(
            f"expected a feature vector of length {model.n_features}, "
            f"got shape {x.shape}"
        )
    return np.exp(_log_softmax((x @ model.weights + model.bias)[None, :]))[0]


def _decision(model_w, model_b, X) -> np.ndarray:
    return np.argmax(X @ model_w + model_b, axis=1)


def _stratified_folds(y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold index per example: classes shuffled then dealt round-robin, with a
    running offset so fold sizes stay balanced across classes."""
    fold = np.empty(len(y), dtype=int)
    offset = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        for i, example in enumerate(idx):
            fold[example] = (offset + i) % k
        offset += len(idx)
    return fold


def grid_search(examples: Sequence, spec: GridSearchSpec, seed: int) -> TrainConfig:
    """Pick the C with the best mean inner-CV accuracy; ties go to the
    smaller C (stronger regularization)."""
    X, y = _stack_examples(examples)
    if len(y) < spec.inner_folds:
        raise ValueError(
            f"{len(y)} examples cannot fill {spec.inner_folds} inner folds"
        )
    folds = _stratified_folds(y, spec.inner_folds, np.random.default_rng(seed))
    best_acc, best_c = -1.0, None
    for c in spec.candidates:
        accuracies = []
        for f in range(spec.inner_folds):
            train_mask = folds != f
            if not train_mask.any() or train_mask.all():
                continue
            pairs = list(zip(X[train_mask], y[train_mask]))
            model = train(pairs, TrainConfig(c=c, seed=seed))
            predictions = _decision(model.weights, model.bias, X[~train_mask])
            accuracies.append(float((predictions == y[~train_mask]).mean()))
        mean_acc = float(np.mean(accuracies))
        if mean_acc > best_acc or (mean_acc == best_acc and c < best_c):
            best_acc, best_c = mean_acc, c
    return TrainConfig(c=best_c, seed=seed)


def model_to_json(model: SoftmaxModel) -> str:
    """Serialize as {"weights": row-major flat array, "bias", "n_classes", "c"}."""
    payload = {
        "weights": [float(w) for w in model.weights.ravel(order="C")],
        "bias": [float(v) for v in model.bias],
        "n_classes": model.n_classes,
        "c": float(model.c),
    }
    return json.dumps(payload)


def model_from_json(text: str) -> SoftmaxModel:
    payload = json.loads(text)
    n_classes = int(payload["n_classes"])
    flat = np.asarray(payload["weights"], dtype=float)
    if n_classes < 1 or flat.size % n_classes:
        raise ValueError("weights length is not a multiple of n_classes")
    weights = flat.reshape(-1, n_classes)
    return SoftmaxModel(
        weights, np.asarray(payload["bias"], dtype=float),
        np.arange(n_classes), float(payload["c"]),
    )
