"""Pulse-level noisy executor modelled on a trapped-ion qubit.

A nominal pulse ``R(gamma, delta)`` is driven for ``t_op = delta / Omega0``
(``delta`` first reduced to ``[0, 2 pi)``, which changes the gate only by a
global phase) with laser phase ``gamma``.  Per shot the emulator draws

* a detuning ``Delta ~ N(0, 2 pi detuning_sigma)`` and a relative intensity
  error ``eps ~ N(0, intensity_rel_sigma)``, shared by all pulses of the shot;
* a timing error ``tau ~ N(0, timing_jitter)`` and a phase error
  ``phi_j ~ N(0, phase_jitter_sigma)`` for every pulse,

and realises each pulse as

    t      = max(t_op + tau, 0)
    delta' = sqrt(Omega0^2 (1 + eps)^2 + Delta^2) t + systematic_delta_offset
    gamma' = gamma + Delta t + phi_j + systematic_gamma_offset

With probability ``collision_prob_per_shot`` a shot reports |0>.  Otherwise
the pulses are applied exactly, the coherence of the state is damped by
``exp(-t_total / T2)`` and one outcome is drawn from ``P0``.  The damping is
applied before the final pulse: that pulse rotates the label state onto |0>,
and damping after it would leave ``P0`` untouched.

Random draws are addressed by counters (see :mod:`reupload.rng`); for a
sequence of ``P`` pulses, shot ``s`` owns counters
``s * (4 + 2P) + [0, 4 + 2P)`` laid out as collision, (Delta, eps) pair,
one (tau, phi_j) pair per pulse, measurement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import kernels, rng
from .circuit import FusedSequence, LabelStateSet, ParameterSet, fused_pulse_arrays
from .core import QubitState, RotationParams, apply, arb_rotation
from .errors import ConfigError, InvalidArgumentError

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class HardwareProfile:
    """``rabi_frequency`` is angular (rad/s); times are in seconds."""

    rabi_frequency: float = TWO_PI * 40e3
    pi_time: float = 12e-6
    coherence_time: float = 5e-3

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"hardware.{f.name}", f"must be a positive number, got {v!r}")


_STOCHASTIC = ("detuning_sigma", "phase_jitter_sigma", "timing_jitter", "intensity_rel_sigma")


@dataclass(frozen=True)
class NoiseConfig:
    """Noise magnitudes.

    ``detuning_sigma`` is in Hz (cycles per second), ``timing_jitter`` in
    seconds, angles in radians.  ``shots = 0`` asks for the infinite-shot
    expectation, which is only available when every stochastic width is
    zero.
    """

    detuning_sigma: float = 0.0
    phase_jitter_sigma: float = 0.0
    timing_jitter: float = 0.0
    intensity_rel_sigma: float = 0.0
    collision_prob_per_shot: float = 0.0
    shots: int = 100
    systematic_delta_offset: float = 0.0
    systematic_gamma_offset: float = 0.0

    def __post_init__(self):
        for name in _STOCHASTIC + ("collision_prob_per_shot",):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ConfigError(f"noise.{name}", f"must be a non-negative number, got {v!r}")
        if self.collision_prob_per_shot > 1:
            raise ConfigError("noise.collision_prob_per_shot", "must not exceed 1")
        for name in ("systematic_delta_offset", "systematic_gamma_offset"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ConfigError(f"noise.{name}", f"must be a finite number, got {v!r}")
        if not isinstance(self.shots, (int, np.integer)) or isinstance(self.shots, bool) or self.shots < 0:
            raise ConfigError("noise.shots", f"must be a non-negative integer, got {self.shots!r}")
        if self.shots == 0 and not self.is_deterministic:
            raise ConfigError("noise.shots", "shots = 0 (expectation) needs every stochastic width to be zero")

    @property
    def is_deterministic(self) -> bool:
        return all(getattr(self, name) == 0 for name in _STOCHASTIC)

    def with_(self, **changes) -> NoiseConfig:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return NoiseConfig(**d)


@dataclass(frozen=True)
class ShotOutcome:
    p0_estimate: float
    shots_used: int
    collisions: int

    def to_dict(self) -> dict:
        return {"p0_estimate": self.p0_estimate, "shots_used": self.shots_used, "collisions": self.collisions}


@dataclass(frozen=True)
class PhysicalPulse:
    laser_phase: float  # rad
    t_op: float  # s
    detuning: float  # Hz


def calibrated_default() -> tuple[HardwareProfile, NoiseConfig]:
    """Default hardware profile and noise magnitudes.

    The collision rate, intensity noise and systematic over-rotation were
    fitted with :func:`reupload.calibration.calibrate` so that a 4-layer
    circle classifier loses about four accuracy points at 100 shots.
    """
    return HardwareProfile(), NoiseConfig(
        detuning_sigma=2e3,
        phase_jitter_sigma=TWO_PI * 1e-3,
        timing_jitter=10e-9,
        intensity_rel_sigma=0.02,
        collision_prob_per_shot=0.01,
        shots=100,
        systematic_delta_offset=0.2,
        systematic_gamma_offset=0.0,
    )


def physical_pulse(p: RotationParams, hw: HardwareProfile) -> PhysicalPulse:
    """Nominal laser settings: resonant drive for ``delta mod 2 pi`` radians."""
    if not (math.isfinite(p.gamma) and math.isfinite(p.delta)):
        raise InvalidArgumentError("pulse angles must be finite")
    return PhysicalPulse(p.gamma, math.fmod(p.delta, TWO_PI) % TWO_PI / hw.rabi_frequency, 0.0)


def _durations(delta: np.ndarray, hw: HardwareProfile) -> np.ndarray:
    return np.mod(np.fmod(delta, TWO_PI), TWO_PI) / hw.rabi_frequency


@dataclass(frozen=True)
class ShotDraws:
    """Standard-normal draws and uniforms for one shot."""

    collision_u: float
    detuning: float
    intensity: float
    timing: tuple[float, ...]
    phase: tuple[float, ...]
    measure_u: float

    @classmethod
    def draw(cls, key: int, shot: int, n_pulses: int) -> ShotDraws:
        stride = kernels.shot_stride(n_pulses)
        u = rng.uniform(key, shot * stride + np.arange(stride, dtype=np.uint64))
        det, eps = rng.box_muller(u[1:2], u[2:3])
        tau, ph = rng.box_muller(u[3:stride - 1:2], u[4:stride - 1:2])
        return cls(float(u[0]), float(det[0]), float(eps[0]), tuple(tau.tolist()), tuple(ph.tolist()), float(u[-1]))


def perturb_pulse(nominal: RotationParams, noise: NoiseConfig, draws: ShotDraws, index: int,
                  hw: HardwareProfile | None = None) -> tuple[RotationParams, float]:
    """Effective pulse and its actual duration for pulse ``index`` of a shot."""
    hw = hw or HardwareProfile()
    phys = physical_pulse(nominal, hw)
    detuning = TWO_PI * noise.detuning_sigma * draws.detuning
    eps = noise.intensity_rel_sigma * draws.intensity
    t = max(phys.t_op + noise.timing_jitter * draws.timing[index], 0.0)
    omega = math.sqrt((hw.rabi_frequency * (1 + eps)) ** 2 + detuning ** 2)
    delta = omega * t + noise.systematic_delta_offset
    gamma = phys.laser_phase + detuning * t + noise.phase_jitter_sigma * draws.phase[index] + noise.systematic_gamma_offset
    return RotationParams(gamma, delta), t


def shot_p0(seq: FusedSequence, hw: HardwareProfile, noise: NoiseConfig, draws: ShotDraws) -> float:
    """``P0`` of one collision-free shot, built from scalar gate algebra."""
    state = QubitState.zero()
    t_total = 0.0
    n = len(seq.pulses)
    for j, p in enumerate(seq.pulses[:-1]):
        eff, t = perturb_pulse(p, noise, draws, j, hw)
        state = apply(arb_rotation(eff), state)
        t_total += t
    eff, t = perturb_pulse(seq.pulses[-1], noise, draws, n - 1, hw)
    t_total += t
    u = arb_rotation(eff)
    damp = math.exp(-t_total / hw.coherence_time)
    rho00 = abs(state.amp0) ** 2
    rho11 = abs(state.amp1) ** 2
    rho01 = damp * state.amp0 * state.amp1.conjugate()
    p0 = abs(u.a) ** 2 * rho00 + abs(u.b) ** 2 * rho11 + 2 * (u.a * rho01 * u.b.conjugate()).real
    return min(1.0, max(0.0, p0))


def reference_execute(seq: FusedSequence, hw: HardwareProfile, noise: NoiseConfig, key: int) -> ShotOutcome:
    """Shot-by-shot scalar implementation, kept as an oracle for the kernels."""
    if noise.shots < 1:
        raise InvalidArgumentError("reference execution needs shots >= 1")
    zeros = collisions = 0
    for s in range(noise.shots):
        d = ShotDraws.draw(key, s, len(seq))
        hit = d.collision_u < noise.collision_prob_per_shot
        collisions += hit
        zeros += hit or d.measure_u < shot_p0(seq, hw, noise, d)
    return ShotOutcome(zeros / noise.shots, noise.shots, collisions)


def _kernel_args(hw: HardwareProfile, noise: NoiseConfig) -> tuple:
    return (
        hw.rabi_frequency,
        TWO_PI * noise.detuning_sigma,
        noise.intensity_rel_sigma,
        noise.phase_jitter_sigma,
        noise.timing_jitter,
        noise.collision_prob_per_shot,
        noise.systematic_delta_offset,
        noise.systematic_gamma_offset,
        hw.coherence_time,
    )


def run_batch(gamma: np.ndarray, delta: np.ndarray, keys: np.ndarray, hw: HardwareProfile,
              noise: NoiseConfig) -> np.ndarray:
    """``P0`` estimates for ``M`` sequences given as ``(M, P)`` arrays."""
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    t_op = np.ascontiguousarray(_durations(np.asarray(delta, dtype=np.float64), hw))
    if noise.shots == 0:
        return kernels.expected_p0(gamma, t_op, hw.rabi_frequency, noise.collision_prob_per_shot,
                                   noise.systematic_delta_offset, noise.systematic_gamma_offset, hw.coherence_time)
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    zeros, _ = kernels.noisy_counts(gamma, t_op, keys, int(noise.shots), *_kernel_args(hw, noise))
    return zeros / noise.shots


def noisy_execute(seq: FusedSequence, hw: HardwareProfile, noise: NoiseConfig, key: int) -> ShotOutcome:
    """Run ``noise.shots`` shots of ``seq`` with random stream ``key``."""
    if noise.shots < 1:
        raise InvalidArgumentError("noisy execution needs shots >= 1; use expected_p0 for the limit")
    arr = seq.as_array()
    t_op = np.ascontiguousarray(_durations(arr[None, :, 1], hw))
    keys = np.array([key & rng.MASK64], dtype=np.uint64)
    zeros, coll = kernels.noisy_counts(np.ascontiguousarray(arr[None, :, 0]), t_op, keys, int(noise.shots),
                                       *_kernel_args(hw, noise))
    return ShotOutcome(int(zeros[0]) / noise.shots, int(noise.shots), int(coll[0]))


def expected_p0(seq: FusedSequence, hw: HardwareProfile, noise: NoiseConfig) -> float:
    """Infinite-shot ``P0`` when every stochastic width is zero."""
    if not noise.is_deterministic:
        raise InvalidArgumentError("the expectation is only closed-form without stochastic noise")
    arr = seq.as_array()
    return float(run_batch(arr[None, :, 0], arr[None, :, 1], np.zeros(1, np.uint64), hw, noise.with_(shots=0))[0])


class EmulatorExecutor:
    """Noisy executor; every draw is keyed by ``(seed, trial, sample, class)``.

    Keys do not depend on the parameters, so two parameter sets evaluated
    with the same trial see the same shot randomness.
    """

    name = "emulator"

    def __init__(self, hw: HardwareProfile | None = None, noise: NoiseConfig | None = None, seed: int = 0):
        if hw is None or noise is None:
            dhw, dnoise = calibrated_default()
            hw = hw or dhw
            noise = noise or dnoise
        self.hw = hw
        self.noise = noise
        self.seed = int(seed)

    def _key(self, trial: int, index: int) -> int:
        return int(rng.raw(rng.stream_key("emulator", self.seed, trial), [index])[0])

    def p0(self, seq: FusedSequence, key: int = 0) -> float:
        if self.noise.shots == 0:
            return expected_p0(seq, self.hw, self.noise)
        return self.execute(seq, key).p0_estimate

    def execute(self, seq: FusedSequence, key: int = 0) -> ShotOutcome:
        return noisy_execute(seq, self.hw, self.noise, self._key(0, key))

    def fidelity_matrix(self, theta: ParameterSet, X, labels: LabelStateSet, *, trial: int = 0) -> np.ndarray:
        return self.fidelity_matrix_vec(theta.ansatz, theta.dim, theta.to_vector(), X, labels, trial=trial)

    def fidelity_matrix_vec(self, ansatz, dim: int, vec, X, labels: LabelStateSet, *, trial: int = 0) -> np.ndarray:
        gamma, delta = fused_pulse_arrays(ansatz, dim, vec, X, labels)
        N, k, P = gamma.shape
        idx = np.arange(N * k, dtype=np.uint64)
        keys = rng.raw(rng.stream_key("emulator", self.seed, trial), idx)
        p0 = run_batch(gamma.reshape(N * k, P), delta.reshape(N * k, P), keys, self.hw, self.noise)
        return p0.reshape(N, k)
