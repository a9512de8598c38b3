"""Simulated training, finite-difference gradients, the pairwise scan and evaluation.

Training minimises the chi-squared loss with the exact simulator.  The scan
then fine-tunes the parameters against any executor by walking over
consecutive parameter pairs and moving each pair to the best point of a
small grid.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels, optim
from .circuit import AnsatzKind, ExactExecutor, LabelStateSet, ParameterSet, label_states, layer_angles, params_per_layer
from .classifier import Prediction, accuracy_from_fidelities, class_probabilities
from .datasets import Dataset, get_problem
from .errors import InvalidArgumentError, TrainingFailure

METHODS = ("derivative-free-evolutionary", "quasi-newton-bounded")


@dataclass(frozen=True)
class OptimizerConfig:
    """``max_evaluations`` is the loss-evaluation budget of each restart.

    ``bound`` limits every parameter to ``[-bound, bound]``; the
    quasi-Newton method uses it as its box, the evolution strategy clips
    candidates to it.
    """

    method: str = "derivative-free-evolutionary"
    max_evaluations: int = 10_000
    restarts: int = 5
    initial_spread: float = 1.0
    convergence_tol: float = 1e-6
    popsize: int = 12
    bound: float = 2 * math.pi
    fd_step: float = 1e-5

    def __post_init__(self):
        from .errors import ConfigError

        if self.method not in METHODS:
            raise ConfigError("optimizer.method", f"expected one of {METHODS}, got {self.method!r}")
        if self.max_evaluations <= 0:
            raise ConfigError("optimizer.max_evaluations", "must be positive")
        if self.restarts < 1:
            raise ConfigError("optimizer.restarts", "must be at least 1")
        if not self.initial_spread > 0:
            raise ConfigError("optimizer.initial_spread", "must be positive")
        if not self.convergence_tol >= 0:
            raise ConfigError("optimizer.convergence_tol", "must be non-negative")
        if self.popsize < 2:
            raise ConfigError("optimizer.popsize", "must be at least 2")
        if not self.bound > math.pi:
            raise ConfigError("optimizer.bound", "must exceed pi so initial points are feasible")
        if not self.fd_step > 0:
            raise ConfigError("optimizer.fd_step", "must be positive")


@dataclass(frozen=True)
class ScanConfig:
    """Pairwise scan settings.

    ``max_pairs`` caps the number of pairs visited per pass (``None`` means
    all consecutive pairs).
    """

    half_width: float = 0.3
    grid: int = 7
    passes: int = 3
    shots_per_point: int = 100
    max_pairs: int | None = None

    def __post_init__(self):
        from .errors import ConfigError

        if not (isinstance(self.grid, int) and self.grid >= 3 and self.grid % 2 == 1):
            raise ConfigError("scan.grid", "must be an odd integer >= 3")
        if not self.half_width > 0:
            raise ConfigError("scan.half_width", "must be positive")
        if self.passes < 1:
            raise ConfigError("scan.passes", "must be at least 1")
        if self.shots_per_point < 0:
            raise ConfigError("scan.shots_per_point", "must be non-negative")
        if self.max_pairs is not None and self.max_pairs < 1:
            raise ConfigError("scan.max_pairs", "must be at least 1")


@dataclass
class TrainReport:
    theta_sim: ParameterSet
    loss_history: list
    final_loss: float
    train_accuracy: float
    test_accuracy: float | None
    wall_time: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "theta_sim": self.theta_sim.to_dict(),
            "loss_history": [[int(i), float(v)] for i, v in self.loss_history],
            "final_loss": self.final_loss,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "wall_time": self.wall_time,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> TrainReport:
        return cls(
            ParameterSet.from_dict(d["theta_sim"]),
            [tuple(p) for p in d["loss_history"]],
            d["final_loss"],
            d["train_accuracy"],
            d["test_accuracy"],
            d["wall_time"],
            d["seed"],
        )


class Objective:
    """Chi-squared loss of a flat parameter vector on fixed data (exact simulator)."""

    def __init__(self, ansatz, dim: int, data: Dataset, labels: LabelStateSet):
        if len(data) == 0:
            raise InvalidArgumentError("empty dataset")
        self.ansatz = AnsatzKind.parse(ansatz)
        self.dim = dim
        self.X = np.ascontiguousarray(data.X, dtype=float)
        self.y = np.asarray(data.y, dtype=np.intp)
        self.rows = np.arange(self.y.size)
        self.labels = labels
        self.amps = labels.amplitudes()

    def fidelities(self, vec) -> np.ndarray:
        y, z = layer_angles(self.ansatz, self.dim, vec, self.X)
        return kernels.fidelities(y, z, self.amps)

    def __call__(self, vec) -> float:
        F = self.fidelities(vec)
        return float(np.sum((F[self.rows, self.y] - 1.0) ** 2) / self.y.size)

    def gradient(self, vec, step: float) -> np.ndarray:
        vec = np.asarray(vec, dtype=float)
        g = np.empty(vec.size)
        for i in range(vec.size):
            up = vec.copy()
            dn = vec.copy()
            up[i] += step
            dn[i] -= step
            g[i] = (self(up) - self(dn)) / (2 * step)
        return g


def fd_gradient(theta: ParameterSet, data: Dataset, labels: LabelStateSet, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of the chi-squared loss in canonical parameter order."""
    if not step > 0:
        raise InvalidArgumentError("step must be positive")
    return Objective(theta.ansatz, theta.dim, data, labels).gradient(theta.to_vector(), step)


def train_simulated(problem, n_layers: int, ansatz, train: Dataset, cfg: OptimizerConfig | None = None,
                    seed: int = 0, test: Dataset | None = None, labels: LabelStateSet | None = None) -> TrainReport:
    """Minimise the chi-squared loss on ``train``; best result over restarts wins."""
    cfg = cfg or OptimizerConfig()
    p = get_problem(problem)
    if n_layers < 1:
        raise InvalidArgumentError("need at least one layer")
    if len(train) == 0:
        raise InvalidArgumentError("empty training set")
    ansatz = AnsatzKind.parse(ansatz)
    labels = labels or label_states(p.classes)
    obj = Objective(ansatz, p.dim, train, labels)
    n = n_layers * params_per_layer(ansatz, p.dim)
    gen = np.random.default_rng(seed)
    start = time.perf_counter()

    best = {"x": None, "f": math.inf, "n": 0, "last_valid": None}
    history: list = []

    def tracked(x):
        v = obj(x)
        best["n"] += 1
        if not math.isfinite(v):
            theta = None if best["last_valid"] is None else ParameterSet.from_vector(ansatz, p.dim, best["last_valid"])
            raise TrainingFailure(f"non-finite loss at evaluation {best['n']}", theta=theta)
        best["last_valid"] = np.array(x, dtype=float)
        if v < best["f"]:
            best["f"] = v
            best["x"] = np.array(x, dtype=float)
            history.append((best["n"], v))
        return v

    for _ in range(cfg.restarts):
        x0 = gen.uniform(-math.pi, math.pi, n)
        if cfg.method == "derivative-free-evolutionary":
            optim.sep_cmaes(tracked, x0, cfg.initial_spread, popsize=cfg.popsize,
                            max_evaluations=cfg.max_evaluations, tol=cfg.convergence_tol,
                            rng=np.random.default_rng(gen.integers(2 ** 63)),
                            bounds=(-cfg.bound, cfg.bound))
        else:
            optim.lbfgsb(tracked, lambda v: obj.gradient(v, cfg.fd_step), x0, -cfg.bound, cfg.bound,
                         max_evaluations=cfg.max_evaluations, tol=cfg.convergence_tol, grad_cost=2 * n)
    theta = ParameterSet.from_vector(ansatz, p.dim, best["x"])
    train_acc = accuracy_from_fidelities(obj.fidelities(best["x"]), obj.y)
    test_acc = None
    if test is not None:
        test_acc = accuracy_from_fidelities(Objective(ansatz, p.dim, test, labels).fidelities(best["x"]), test.y)
    return TrainReport(theta, history, float(best["f"]), train_acc, test_acc, time.perf_counter() - start, int(seed))


def _with_shots(executor, shots):
    if shots is None or getattr(executor, "noise", None) is None:
        return executor
    from .emulator import EmulatorExecutor

    return EmulatorExecutor(executor.hw, executor.noise.with_(shots=int(shots)), executor.seed)


def evaluate(theta: ParameterSet, data: Dataset, labels: LabelStateSet, executor=None, shots: int | None = None,
             *, trial: int = 0) -> tuple[float, list[Prediction]]:
    """Accuracy and per-sample predictions under ``executor``.

    ``shots`` overrides the emulator's shot count and is ignored by the
    exact executor.
    """
    executor = _with_shots(executor or ExactExecutor(), shots)
    if len(data) == 0:
        raise InvalidArgumentError("empty dataset")
    F = executor.fidelity_matrix(theta, data.X, labels, trial=trial)
    preds = []
    for row in F:
        probs = class_probabilities(row) if row.sum() > 0 else np.full(row.size, 1.0 / row.size)
        preds.append(Prediction(row, probs, int(np.argmax(row))))
    return accuracy_from_fidelities(F, data.y), preds


def _scorer(executor, ansatz, dim, data: Dataset, labels: LabelStateSet, trial: int):
    if hasattr(executor, "fidelity_matrix_vec"):
        return lambda v: accuracy_from_fidelities(
            executor.fidelity_matrix_vec(ansatz, dim, v, data.X, labels, trial=trial), data.y)
    return lambda v: accuracy_from_fidelities(
        executor.fidelity_matrix(ParameterSet.from_vector(ansatz, dim, v), data.X, labels, trial=trial), data.y)


def fine_tune(theta_sim: ParameterSet, executor, eval_data: Dataset, labels: LabelStateSet,
              cfg: ScanConfig | None = None, *, trial: int = 0) -> tuple[ParameterSet, list[float]]:
    """Sequential two-parameter grid scan against ``executor``.

    Each pass visits the pairs ``(0, 1), (1, 2), ...`` in canonical order.
    For a pair, the grid spans ``+-half_width`` around the values the pair
    had when the pass began; the current point is always on the grid, so
    accuracy never decreases.  Ties keep the point closest to the current
    one.  Every evaluation uses the same shot randomness (``trial``), so the
    scanned accuracy is a deterministic function of the parameters.

    Returns the tuned parameters and the accuracy after each pair step,
    starting with the accuracy at ``theta_sim``.
    """
    cfg = cfg or ScanConfig()
    if len(eval_data) == 0:
        raise InvalidArgumentError("empty evaluation set")
    executor = _with_shots(executor, cfg.shots_per_point)
    score = _scorer(executor, theta_sim.ansatz, theta_sim.dim, eval_data, labels, trial)
    vec = theta_sim.to_vector()
    n = vec.size
    offsets = np.linspace(-cfg.half_width, cfg.half_width, cfg.grid)
    pairs = [(i, i + 1) for i in range(n - 1)] if n > 1 else [(0, 0)]
    if cfg.max_pairs is not None:
        pairs = pairs[: cfg.max_pairs]
    acc = score(vec)
    trace = [acc]
    for _ in range(cfg.passes):
        centre = vec.copy()
        improved = False
        for i, j in pairs:
            best_acc, best_ij, best_move = acc, (vec[i], vec[j]), 0.0
            for a in centre[i] + offsets:
                for b in (centre[j] + offsets if j != i else [a]):
                    cand = vec.copy()
                    cand[i] = a
                    cand[j] = b
                    move = math.hypot(a - vec[i], b - vec[j])
                    s = score(cand)
                    if s > best_acc or (s == best_acc and move < best_move):
                        best_acc, best_ij, best_move = s, (a, b), move
            if best_acc > acc:
                improved = True
            vec[i], vec[j] = best_ij
            acc = best_acc
            trace.append(acc)
        if not improved:
            break
    return ParameterSet.from_vector(theta_sim.ansatz, theta_sim.dim, vec), trace
