"""Single-hidden-layer neural network with a parameter budget matched to a quantum model.

The network is ``softmax(W2 act(W1 x + b1) + b2)``, trained by full-batch
gradient descent with momentum on the mean cross-entropy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import InvalidArgumentError, TrainingFailure

ACTIVATIONS = ("tanh", "relu", "logistic")


def _act(name: str, a: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(a)
    if name == "relu":
        return np.maximum(a, 0.0)
    if name == "logistic":
        return 0.5 * (1.0 + np.tanh(0.5 * a))
    raise InvalidArgumentError(f"unknown activation {name!r}; choose from {ACTIVATIONS}")


def _act_grad(name: str, a: np.ndarray, h: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return 1.0 - h * h
    if name == "relu":
        return (a > 0).astype(float)
    return h * (1.0 - h)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def n_params(d: int, h: int, k: int) -> int:
    return h * (d + 1) + (h + 1) * k


def match_width(quantum_params: int, d: int, k: int) -> int:
    """Largest hidden width whose parameter count fits within ``quantum_params``."""
    if d < 1 or k < 2:
        raise InvalidArgumentError("need d >= 1 and k >= 2")
    if quantum_params < n_params(d, 1, k):
        raise InvalidArgumentError(
            f"budget {quantum_params} is below the {n_params(d, 1, k)} parameters of a width-1 network")
    # h (d + 1) + (h + 1) k <= budget  <=>  h <= (budget - k) / (d + 1 + k)
    return (quantum_params - k) // (d + 1 + k)


@dataclass
class NNModel:
    activation: str
    W1: np.ndarray  # (h, d)
    b1: np.ndarray  # (h,)
    W2: np.ndarray  # (k, h)
    b2: np.ndarray  # (k,)

    @property
    def d(self) -> int:
        return self.W1.shape[1]

    @property
    def h(self) -> int:
        return self.W1.shape[0]

    @property
    def k(self) -> int:
        return self.W2.shape[0]

    @property
    def n_params(self) -> int:
        return n_params(self.d, self.h, self.k)

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), self.b2])

    @classmethod
    def from_flat(cls, activation: str, d: int, h: int, k: int, v) -> NNModel:
        v = np.asarray(v, dtype=float)
        if v.size != n_params(d, h, k):
            raise InvalidArgumentError(f"expected {n_params(d, h, k)} weights, got {v.size}")
        i = 0
        W1 = v[i:i + h * d].reshape(h, d)
        i += h * d
        b1 = v[i:i + h]
        i += h
        W2 = v[i:i + k * h].reshape(k, h)
        i += k * h
        return cls(activation, W1.copy(), b1.copy(), W2.copy(), v[i:].copy())

    def forward(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise InvalidArgumentError(f"model expects {self.d} features, got {X.shape[1]}")
        return softmax(_act(self.activation, X @ self.W1.T + self.b1) @ self.W2.T + self.b2)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.forward(X), axis=1)

    def to_dict(self) -> dict:
        return {"activation": self.activation, "d": self.d, "h": self.h, "k": self.k, "weights": self.flat().tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> NNModel:
        return cls.from_flat(d["activation"], int(d["d"]), int(d["h"]), int(d["k"]), d["weights"])


def _unpack(v: np.ndarray, d: int, h: int, k: int):
    i = h * d
    return v[:i].reshape(h, d), v[i:i + h], v[i + h:i + h + k * h].reshape(k, h), v[i + h + k * h:]


def _loss_grad_flat(v, activation, d, h, k, X, y, rows):
    W1, b1, W2, b2 = _unpack(v, d, h, k)
    n = len(y)
    a = X @ W1.T + b1
    hid = _act(activation, a)
    z = hid @ W2.T + b2
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -float(logp[rows, y].sum()) / n
    dz = np.exp(logp)
    dz[rows, y] -= 1.0
    dz /= n
    da = (dz @ W2) * _act_grad(activation, a, hid)
    return loss, np.concatenate([(da.T @ X).ravel(), da.sum(axis=0), (dz.T @ hid).ravel(), dz.sum(axis=0)])


def loss_and_grad(model: NNModel, X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient in ``model.flat()`` order."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.intp)
    return _loss_grad_flat(model.flat(), model.activation, model.d, model.h, model.k, X, y, np.arange(len(y)))


def _train_one(X, y, d, h, k, activation, epochs, lr, momentum, rng):
    v = np.concatenate([
        rng.normal(0, 1 / math.sqrt(d), h * d), np.zeros(h),
        rng.normal(0, 1 / math.sqrt(h), k * h), np.zeros(k),
    ])
    rows = np.arange(len(y))
    vel = np.zeros_like(v)
    best_v, best_loss = v.copy(), math.inf
    for _ in range(epochs + 1):
        loss, g = _loss_grad_flat(v, activation, d, h, k, X, y, rows)
        if not math.isfinite(loss):
            raise TrainingFailure(f"non-finite cross-entropy with {activation}",
                                  theta=NNModel.from_flat(activation, d, h, k, best_v))
        if loss < best_loss:
            best_loss, best_v = loss, v.copy()
        vel = momentum * vel - lr * g
        v = v + vel
    return NNModel.from_flat(activation, d, h, k, best_v), best_loss


def train_nn(train: Dataset, h: int, activation: str | None = None, epochs: int = 5000, seed: int = 0, *,
             lr: float = 0.05, momentum: float = 0.9, restarts: int = 5) -> NNModel:
    """Best (lowest training loss) network over restarts and, when
    ``activation`` is None, over all activations."""
    if len(train) == 0:
        raise InvalidArgumentError("empty training set")
    if h < 1:
        raise InvalidArgumentError("hidden width must be >= 1")
    X = np.asarray(train.X, dtype=float)
    y = np.asarray(train.y, dtype=np.intp)
    d, k = X.shape[1], train.problem.classes
    acts = ACTIVATIONS if activation is None else (activation,)
    for a in acts:
        if a not in ACTIVATIONS:
            raise InvalidArgumentError(f"unknown activation {a!r}; choose from {ACTIVATIONS}")
    best, best_loss = None, math.inf
    for ai, a in enumerate(acts):
        rng = np.random.default_rng([seed, ai])
        for _ in range(restarts):
            model, loss = _train_one(X, y, d, h, k, a, epochs, lr, momentum, rng)
            if loss < best_loss:
                best, best_loss = model, loss
    return best


def nn_accuracy(model: NNModel, data: Dataset) -> float:
    if len(data) == 0:
        raise InvalidArgumentError("empty dataset")
    return float(np.count_nonzero(model.predict(data.X) == data.y) / len(data))
