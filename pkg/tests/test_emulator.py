import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reupload.circuit import ExactExecutor, FusedSequence, ParameterSet, fuse, label_states, run_exact
from reupload.core import RotationParams
from reupload.datasets import sample_dataset
from reupload.emulator import (EmulatorExecutor, HardwareProfile, NoiseConfig, ShotDraws, calibrated_default,
                               expected_p0, noisy_execute, perturb_pulse, physical_pulse, reference_execute,
                               run_batch)
from reupload.errors import ConfigError, InvalidArgumentError

HALF = FusedSequence((RotationParams(math.pi / 2, math.pi / 2), RotationParams(0.0, 0.0)))
NO_DECAY = HardwareProfile(coherence_time=1e30)


def seq_from(rng, n=4):
    return FusedSequence(tuple(RotationParams(float(g), float(d))
                               for g, d in zip(rng.uniform(-3, 3, n), rng.uniform(-6, 6, n))))


def estimates(seq, hw, noise, reps, base=0):
    arr = seq.as_array()
    g = np.repeat(arr[None, :, 0], reps, axis=0)
    d = np.repeat(arr[None, :, 1], reps, axis=0)
    keys = np.arange(base, base + reps, dtype=np.uint64) * np.uint64(7919) + np.uint64(1)
    return run_batch(g, d, keys, hw, noise)


def test_pulse_durations():
    assert physical_pulse(RotationParams(0, math.pi), HardwareProfile(2 * math.pi * 41.6667e3)).t_op == \
        pytest.approx(12e-6, rel=1e-4)
    assert physical_pulse(RotationParams(0, math.pi), HardwareProfile()).t_op == pytest.approx(12.5e-6, rel=1e-12)
    assert physical_pulse(RotationParams(0, 0.0), HardwareProfile()).t_op == 0.0


def test_negative_angles_map_to_positive_durations():
    hw = HardwareProfile()
    t = physical_pulse(RotationParams(0, -math.pi / 2), hw).t_op
    assert t == pytest.approx(1.5 * math.pi / hw.rabi_frequency, rel=1e-12)


def test_zero_noise_pulse_is_nominal():
    d = ShotDraws.draw(3, 0, 2)
    p = RotationParams(0.4, 1.3)
    eff, _ = perturb_pulse(p, NoiseConfig(), d, 0)
    assert eff.gamma == p.gamma
    assert abs(eff.delta - p.delta) < 1e-12


def test_detuning_scales_rotation_angle():
    hw = HardwareProfile()
    delta_hz = 5e3
    d = ShotDraws(0.5, 1.0, 0.0, (0.0,), (0.0,), 0.5)
    eff, t = perturb_pulse(RotationParams(0.0, 1.0), NoiseConfig(detuning_sigma=delta_hz), d, 0, hw)
    Delta = 2 * math.pi * delta_hz
    assert eff.delta / 1.0 == pytest.approx(math.hypot(hw.rabi_frequency, Delta) / hw.rabi_frequency, rel=1e-12)
    assert eff.gamma == pytest.approx(Delta * t, rel=1e-12)


def test_systematic_offset_adds_to_every_pulse():
    d = ShotDraws.draw(1, 0, 3)
    noise = NoiseConfig(systematic_delta_offset=0.1)
    for i, delta in enumerate((0.2, 1.7, 3.0)):
        eff, _ = perturb_pulse(RotationParams(0.0, delta), noise, d, i)
        assert eff.delta == pytest.approx(delta + 0.1, abs=1e-12)


def test_noise_config_validation():
    with pytest.raises(ConfigError):
        NoiseConfig(detuning_sigma=-1.0)
    with pytest.raises(ConfigError):
        NoiseConfig(collision_prob_per_shot=1.5)
    with pytest.raises(ConfigError):
        NoiseConfig(shots=-1)
    with pytest.raises(ConfigError):
        NoiseConfig(timing_jitter=1e-9, shots=0)
    with pytest.raises(ConfigError):
        HardwareProfile(rabi_frequency=0.0)
    NoiseConfig(systematic_delta_offset=-0.2)


def test_calibrated_defaults():
    hw, noise = calibrated_default()
    assert noise.detuning_sigma == 2e3
    assert noise.timing_jitter == 10e-9
    assert noise.shots == 100
    assert hw.rabi_frequency == pytest.approx(2 * math.pi * 40e3)


def test_noisy_execute_needs_shots():
    with pytest.raises(InvalidArgumentError):
        noisy_execute(HALF, NO_DECAY, NoiseConfig(shots=0), 0)
    with pytest.raises(InvalidArgumentError):
        expected_p0(HALF, NO_DECAY, NoiseConfig(timing_jitter=1e-9))


def test_noise_free_limit_large_shots(rng):
    for _ in range(3):
        seq = seq_from(rng)
        p = run_exact(seq)
        out = noisy_execute(seq, NO_DECAY, NoiseConfig(shots=1_000_000), int(rng.integers(1 << 62)))
        assert abs(out.p0_estimate - p) <= 3 * math.sqrt(max(p * (1 - p), 1e-12) / 1e6) + 1e-12
        assert out.collisions == 0


def test_expectation_mode_matches_exact(rng):
    for _ in range(5):
        seq = seq_from(rng)
        assert expected_p0(seq, NO_DECAY, NoiseConfig(shots=0)) == pytest.approx(run_exact(seq), abs=1e-12)


def test_shot_std_at_one_half():
    est = estimates(HALF, NO_DECAY, NoiseConfig(shots=100), 1000)
    assert abs(est.std(ddof=1) - 0.05) < 0.2 * 0.05


def test_unbiased_against_analytic_mean():
    # per-shot model: collision with probability c, otherwise a Bernoulli(P0)
    noise = NoiseConfig(collision_prob_per_shot=0.1, systematic_delta_offset=0.3, shots=200)
    seq = FusedSequence((RotationParams(0.3, 1.1), RotationParams(1.0, 2.0), RotationParams(-0.5, 0.7)))
    hw = HardwareProfile()
    mean = expected_p0(seq, hw, noise)
    est = estimates(seq, hw, noise, 1000)
    sigma = math.sqrt(mean * (1 - mean) / (200 * 1000))
    assert abs(est.mean() - mean) <= 3 * sigma


def test_dephasing_pulls_toward_mixture():
    seq = FusedSequence((RotationParams(math.pi / 2, math.pi / 2), RotationParams(math.pi / 2, -math.pi / 2)))
    assert expected_p0(seq, NO_DECAY, NoiseConfig(shots=0)) == pytest.approx(1.0, abs=1e-12)
    hw = HardwareProfile(coherence_time=1e-6)
    assert expected_p0(seq, hw, NoiseConfig(shots=0)) == pytest.approx(0.5, abs=1e-6)


def test_collisions_report_zero():
    seq = FusedSequence((RotationParams(math.pi / 2, math.pi), RotationParams(0.0, 0.0)))
    out = noisy_execute(seq, NO_DECAY, NoiseConfig(collision_prob_per_shot=1.0, shots=50), 9)
    assert out.p0_estimate == 1.0 and out.collisions == 50


def test_kernel_matches_scalar_reference(rng):
    hw, noise = calibrated_default()
    noise = noise.with_(intensity_rel_sigma=0.05, detuning_sigma=5e3, shots=64, systematic_gamma_offset=0.05)
    for _ in range(4):
        seq = seq_from(rng, int(rng.integers(2, 6)))
        key = int(rng.integers(1 << 62))
        assert noisy_execute(seq, hw, noise, key) == reference_execute(seq, hw, noise, key)


@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 300))
def test_same_key_same_outcome(key, shots):
    hw, noise = calibrated_default()
    noise = noise.with_(shots=shots)
    seq = FusedSequence((RotationParams(0.1, 1.0), RotationParams(0.7, 2.0)))
    a = noisy_execute(seq, hw, noise, key)
    assert a == noisy_execute(seq, hw, noise, key)
    assert a.shots_used == shots
    assert 0 <= a.p0_estimate <= 1


def test_shot_std_scales_as_inverse_sqrt():
    for n in (25, 100, 400, 1600):
        est = estimates(HALF, NO_DECAY, NoiseConfig(shots=n), 1000, base=n)
        want = math.sqrt(0.25 / n)
        assert abs(est.std(ddof=1) - want) <= 0.2 * want


def test_executor_keys_independent_of_parameters():
    ex = EmulatorExecutor(*calibrated_default(), seed=4)
    labels = label_states(2)
    X = sample_dataset("circle", 30, 0).X
    theta = ParameterSet.from_vector("A", 2, np.linspace(-1, 1, 8))
    a = ex.fidelity_matrix(theta, X, labels, trial=2)
    assert np.array_equal(a, ex.fidelity_matrix(theta, X, labels, trial=2))
    assert not np.array_equal(a, ex.fidelity_matrix(theta, X, labels, trial=3))


def test_noise_free_expectation_executor_equals_exact(rng):
    ex = EmulatorExecutor(NO_DECAY, NoiseConfig(shots=0))
    labels = label_states(4)
    theta = ParameterSet.from_vector("B", 2, rng.normal(size=12))
    X = rng.uniform(-1, 1, (25, 2))
    assert np.allclose(ex.fidelity_matrix(theta, X, labels), ExactExecutor().fidelity_matrix(theta, X, labels),
                       atol=1e-12)


def test_executor_p0_matches_fused_sequence(rng):
    ex = EmulatorExecutor(NO_DECAY, NoiseConfig(shots=0))
    theta = ParameterSet.from_vector("A", 2, rng.normal(size=8))
    seq = fuse(theta, [0.2, 0.4], 1, label_states(2))
    assert ex.p0(seq) == pytest.approx(run_exact(seq), abs=1e-12)
