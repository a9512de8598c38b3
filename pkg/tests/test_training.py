import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reupload.circuit import ExactExecutor, ParameterSet, label_states
from reupload.classifier import accuracy
from reupload.datasets import Dataset, Problem, sample_dataset, train_test
from reupload.emulator import EmulatorExecutor, HardwareProfile, NoiseConfig
from reupload.errors import ConfigError, InvalidArgumentError, TrainingFailure
from reupload.training import (Objective, OptimizerConfig, ScanConfig, TrainReport, evaluate, fd_gradient,
                               fine_tune, train_simulated)

FAST = OptimizerConfig(max_evaluations=1500, restarts=2)
HALF_PLANE = Problem("half-plane", 2, 2, "B")


def half_plane(n, seed):
    r = np.random.default_rng(seed)
    X = r.uniform(-1, 1, (n, 2))
    return Dataset(HALF_PLANE, X, (X[:, 0] > 0).astype(np.int64))


@pytest.fixture(scope="module")
def circle_l2():
    train, test = train_test("circle", 200, 300, 0)
    rep = train_simulated("circle", 2, "A", train, OptimizerConfig(max_evaluations=3000, restarts=2), seed=0,
                          test=test)
    return rep, train, test


def test_separable_problem_single_layer():
    train, test = half_plane(200, 0), half_plane(1000, 1)
    rep = train_simulated(HALF_PLANE, 1, "B", train, FAST, seed=0, test=test)
    assert rep.test_accuracy >= 0.99


def test_report_reproducible_and_serialisable(circle_l2):
    rep, train, test = circle_l2
    again = train_simulated("circle", 2, "A", train, OptimizerConfig(max_evaluations=3000, restarts=2), seed=0,
                            test=test)
    a, b = rep.to_dict(), again.to_dict()
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b
    back = TrainReport.from_dict(rep.to_dict())
    assert back.theta_sim == rep.theta_sim and back.final_loss == rep.final_loss


def test_history_non_increasing(circle_l2):
    rep = circle_l2[0]
    vals = [v for _, v in rep.loss_history]
    assert vals == sorted(vals, reverse=True)
    assert vals[-1] == rep.final_loss


def test_reported_accuracy_matches_classifier(circle_l2):
    rep, _, test = circle_l2
    labels = label_states(2)
    assert evaluate(rep.theta_sim, test, labels)[0] == accuracy(rep.theta_sim, test, labels) == rep.test_accuracy


def test_quasi_newton_trains():
    train, test = train_test("circle", 100, 300, 1)
    cfg = OptimizerConfig(method="quasi-newton-bounded", max_evaluations=3000, restarts=2)
    rep = train_simulated("circle", 2, "A", train, cfg, seed=1, test=test)
    assert rep.train_accuracy > 0.75


def test_training_failure_on_non_finite(monkeypatch):
    train = sample_dataset("circle", 20, 0)
    monkeypatch.setattr(Objective, "__call__", lambda self, v: math.nan)
    with pytest.raises(TrainingFailure):
        train_simulated("circle", 1, "A", train, FAST)


def test_input_errors():
    train = sample_dataset("circle", 20, 0)
    with pytest.raises(InvalidArgumentError):
        train_simulated("circle", 0, "A", train)
    with pytest.raises(ConfigError):
        OptimizerConfig(method="newton")
    with pytest.raises(ConfigError):
        ScanConfig(grid=4)


def test_gradient_zero_at_global_minimum():
    # every sample is in class 0 and the identity circuit maps it to |0>
    X = np.random.default_rng(0).uniform(-1, 1, (30, 2))
    data = Dataset(HALF_PLANE, X, np.zeros(30, dtype=np.int64))
    step = 1e-4
    g = fd_gradient(ParameterSet.zeros("A", 2, 2), data, label_states(2), step)
    assert np.max(np.abs(g)) <= 2 * step ** 2


def test_gradient_of_dead_parameter():
    X = np.random.default_rng(1).uniform(-1, 1, (40, 2))
    X[:, 1] = 0.0
    data = Dataset(HALF_PLANE, X, (X[:, 0] > 0).astype(np.int64))
    theta = ParameterSet.from_vector("A", 2, np.random.default_rng(2).normal(size=8))
    g = fd_gradient(theta, data, label_states(2))
    assert abs(g[1]) < 1e-10 and abs(g[5]) < 1e-10


def test_gradient_against_analytic_single_layer():
    # one layer, one sample at x = 0, class 0: loss = (cos^2(alpha/2) - 1)^2 = sin^4(alpha/2)
    data = Dataset(HALF_PLANE, np.zeros((1, 2)), np.zeros(1, dtype=np.int64))
    a = 0.7
    theta = ParameterSet.from_vector("A", 2, [0.3, -0.2, a, 0.4])
    want = 2 * math.sin(a / 2) ** 3 * math.cos(a / 2)
    assert fd_gradient(theta, data, label_states(2))[2] == pytest.approx(want, abs=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_richardson_consistency(seed):
    r = np.random.default_rng(seed)
    data = sample_dataset("squares", 40, seed)
    theta = ParameterSet.from_vector("A", 2, r.uniform(-math.pi, math.pi, 8))
    labels = label_states(4)
    h = 0.05
    g1, g2, g4 = (fd_gradient(theta, data, labels, s) for s in (h, h / 2, h / 4))
    d1, d2 = np.abs(g1 - g2), np.abs(g2 - g4)
    mask = d2 > 1e-9
    ratio = d1[mask] / d2[mask]
    assert mask.sum() > 0
    assert np.all((ratio > 3.5) & (ratio < 4.5)), ratio


def test_scan_on_exact_executor_stays_local(circle_l2):
    rep, _, test = circle_l2
    cfg = ScanConfig(half_width=0.05, grid=3, passes=1, max_pairs=3)
    theta_q, trace = fine_tune(rep.theta_sim, ExactExecutor(), test, label_states(2), cfg)
    assert trace[-1] >= trace[0]
    assert np.max(np.abs(theta_q.to_vector() - rep.theta_sim.to_vector())) <= cfg.half_width + 1e-12
    assert trace[-1] - trace[0] <= 0.02


def test_scan_recovers_systematic_offset(circle_l2):
    rep, _, test = circle_l2
    labels = label_states(2)
    ex = EmulatorExecutor(HardwareProfile(coherence_time=1e30), NoiseConfig(systematic_delta_offset=0.1, shots=0))
    before = evaluate(rep.theta_sim, test, labels, ex)[0]
    theta_q, trace = fine_tune(rep.theta_sim, ex, test, labels, ScanConfig(passes=1, shots_per_point=0))
    after = evaluate(theta_q, test, labels, ex)[0]
    assert trace[0] == before and trace[-1] == after
    assert after > before


@settings(max_examples=10)
@given(st.integers(0, 1000), st.floats(0.05, 0.4), st.integers(1, 2))
def test_scan_monotone_and_local(seed, half_width, passes):
    r = np.random.default_rng(seed)
    data = sample_dataset("circle", 60, seed)
    theta = ParameterSet.from_vector("A", 2, r.uniform(-2, 2, 4))
    labels = label_states(2)
    ex = EmulatorExecutor(seed=seed)
    cfg = ScanConfig(half_width=half_width, grid=3, passes=passes, shots_per_point=20)
    theta_q, trace = fine_tune(theta, ex, data, labels, cfg, trial=5)
    scored = EmulatorExecutor(ex.hw, ex.noise.with_(shots=20), seed=seed)
    assert evaluate(theta_q, data, labels, scored, trial=5)[0] >= evaluate(theta, data, labels, scored, trial=5)[0]
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert np.max(np.abs(theta_q.to_vector() - theta.to_vector())) <= passes * half_width + 1e-12


def test_evaluate_shots_override():
    data = sample_dataset("circle", 50, 0)
    theta = ParameterSet.zeros("A", 2, 1)
    ex = EmulatorExecutor(seed=1)
    acc, preds = evaluate(theta, data, label_states(2), ex, shots=10)
    assert 0 <= acc <= 1 and len(preds) == 50
    assert all(abs(p.probabilities.sum() - 1) < 1e-12 for p in preds)
