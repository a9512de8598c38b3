"""Fidelities to class probabilities, guesses, the chi-squared loss and accuracy.

Executors expose ``fidelity_matrix(theta, X, labels, *, trial=0)`` returning
an ``(N, k)`` array of (possibly estimated) fidelities; everything here is
written against that one method so the exact simulator and the noisy
emulator share the same scoring code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import ExactExecutor, LabelStateSet, ParameterSet
from .errors import DegenerateInputError, InvalidArgumentError


@dataclass(frozen=True)
class Prediction:
    fidelities: np.ndarray
    probabilities: np.ndarray
    guess: int


def class_probabilities(fidelities) -> np.ndarray:
    """Fidelities divided by their sum."""
    f = np.asarray(fidelities, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise InvalidArgumentError("expected a nonempty fidelity vector")
    if np.any(f < 0) or np.any(f > 1) or not np.all(np.isfinite(f)):
        raise InvalidArgumentError("fidelities must lie in [0, 1]")
    total = f.sum()
    if total <= 0:
        raise DegenerateInputError("all fidelities are zero")
    return f / total


def guess_class(fidelities) -> int:
    """Index of the largest fidelity; ties go to the lowest index."""
    f = np.asarray(fidelities, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise InvalidArgumentError("cannot guess from an empty fidelity vector")
    return int(np.argmax(f))


def guesses(F: np.ndarray) -> np.ndarray:
    """Row-wise ``guess_class`` for an ``(N, k)`` fidelity matrix."""
    return np.argmax(F, axis=1)


def predict(fidelities) -> Prediction:
    f = np.asarray(fidelities, dtype=float)
    return Prediction(f, class_probabilities(f), guess_class(f))


def chi2_from_fidelities(F: np.ndarray, y: np.ndarray) -> float:
    """Mean of ``(F[i, y_i] - 1)^2``, summed in sample order."""
    y = np.asarray(y, dtype=np.intp)
    if y.size == 0:
        raise InvalidArgumentError("empty dataset")
    true_f = F[np.arange(y.size), y]
    return float(np.sum((true_f - 1.0) ** 2) / y.size)


def accuracy_from_fidelities(F: np.ndarray, y: np.ndarray) -> float:
    y = np.asarray(y)
    if y.size == 0:
        raise InvalidArgumentError("empty dataset")
    return float(np.count_nonzero(guesses(F) == y) / y.size)


def _check(data, labels: LabelStateSet):
    if len(data) == 0:
        raise InvalidArgumentError("empty dataset")
    if data.y.max() >= labels.k:
        raise InvalidArgumentError(f"dataset has class {int(data.y.max())} but only {labels.k} labels")


def chi2_loss(theta: ParameterSet, data, labels: LabelStateSet, executor=None, *, trial: int = 0) -> float:
    _check(data, labels)
    executor = executor or ExactExecutor()
    return chi2_from_fidelities(executor.fidelity_matrix(theta, data.X, labels, trial=trial), data.y)


def accuracy(theta: ParameterSet, data, labels: LabelStateSet, executor=None, *, trial: int = 0) -> float:
    _check(data, labels)
    executor = executor or ExactExecutor()
    return accuracy_from_fidelities(executor.fidelity_matrix(theta, data.X, labels, trial=trial), data.y)
