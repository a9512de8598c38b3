"""Pure numpy implementations of the hot kernels.

These define the reference semantics; ``_ckernels.pyx`` must match them
draw for draw.
"""
from __future__ import annotations

import numpy as np

from . import rng

# per-shot counter layout: collision, (detuning, intensity) pair,
# one (timing, phase) pair per pulse, measurement
def shot_stride(n_pulses: int) -> int:
    return 4 + 2 * n_pulses


def fidelities(y: np.ndarray, z: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Exact ``|<label_c|psi>|^2`` for states built from layer angles.

    ``y`` and ``z`` are ``(N, L)`` Ry/Rz angles; ``labels`` is ``(k, 2)``
    complex amplitudes.  Returns ``(N, k)``.
    """
    N, L = y.shape
    a = np.ones(N, dtype=np.complex128)
    b = np.zeros(N, dtype=np.complex128)
    for j in range(L):
        c = np.cos(0.5 * y[:, j])
        s = np.sin(0.5 * y[:, j])
        a, b = c * a - s * b, s * a + c * b
        ph = np.exp(0.5j * z[:, j])
        a = a * ph.conj()
        b = b * ph
    inner = np.outer(a, labels[:, 0].conj()) + np.outer(b, labels[:, 1].conj())
    return np.clip(inner.real ** 2 + inner.imag ** 2, 0.0, 1.0)


def _pulse_chain(gamma, delta, a, b):
    """Apply ``R(gamma, delta)`` element-wise to amplitude arrays."""
    c = np.cos(0.5 * delta)
    s = np.sin(0.5 * delta)
    e = np.exp(1j * gamma)
    a2 = c * a - 1j * s * e.conj() * b
    b2 = -1j * s * e * a + c * b
    return a2, b2


def _p0_final(a, b, gamma, delta, damp):
    """P0 after dephasing ``(a, b)`` by ``damp`` and applying the last pulse."""
    c = np.cos(0.5 * delta)
    s = np.sin(0.5 * delta)
    m00 = c
    m01 = -1j * s * np.exp(-1j * gamma)
    rho00 = a.real ** 2 + a.imag ** 2
    rho11 = b.real ** 2 + b.imag ** 2
    rho01 = damp * a * b.conj()
    p0 = (m00 ** 2) * rho00 + (m01.real ** 2 + m01.imag ** 2) * rho11 + 2.0 * (m00 * rho01 * m01.conj()).real
    return np.clip(p0, 0.0, 1.0)


def noisy_counts(gamma, t_op, keys, shots, omega0, detuning_sigma, intensity_sigma,
                 phase_sigma, timing_sigma, collision_p, delta_offset, gamma_offset, t2):
    """Per-shot noisy execution of ``M`` pulse sequences.

    ``gamma`` and ``t_op`` are ``(M, P)``; ``detuning_sigma`` is an angular
    frequency.  Returns ``(zeros, collisions)``, integer arrays of length
    ``M`` counting |0> outcomes and collision events.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    t_op = np.asarray(t_op, dtype=np.float64)
    M, P = gamma.shape
    stride = shot_stride(P)
    zeros = np.zeros(M, dtype=np.int64)
    collisions = np.zeros(M, dtype=np.int64)
    base = np.arange(shots, dtype=np.uint64) * np.uint64(stride)
    for m in range(M):
        key = int(keys[m])
        u = rng.uniform(key, base[:, None] + np.arange(stride, dtype=np.uint64)[None, :])
        hit = u[:, 0] < collision_p
        det, eps = rng.box_muller(u[:, 1], u[:, 2])
        det = detuning_sigma * det
        eps = intensity_sigma * eps
        omega = np.sqrt((omega0 * (1.0 + eps)) ** 2 + det ** 2)
        a = np.ones(shots, dtype=np.complex128)
        b = np.zeros(shots, dtype=np.complex128)
        t_total = np.zeros(shots)
        g_last = d_last = None
        for j in range(P):
            tau, phj = rng.box_muller(u[:, 3 + 2 * j], u[:, 4 + 2 * j])
            t = np.maximum(t_op[m, j] + timing_sigma * tau, 0.0)
            t_total += t
            d_eff = omega * t + delta_offset
            g_eff = gamma[m, j] + det * t + phase_sigma * phj + gamma_offset
            if j < P - 1:
                a, b = _pulse_chain(g_eff, d_eff, a, b)
            else:
                g_last, d_last = g_eff, d_eff
        damp = np.exp(-t_total / t2)
        p0 = _p0_final(a, b, g_last, d_last, damp)
        outcome0 = u[:, stride - 1] < p0
        zeros[m] = int(np.count_nonzero(hit | outcome0))
        collisions[m] = int(np.count_nonzero(hit))
    return zeros, collisions


def expected_p0(gamma, t_op, omega0, collision_p, delta_offset, gamma_offset, t2):
    """Infinite-shot limit of ``noisy_counts`` when every stochastic width is zero."""
    gamma = np.asarray(gamma, dtype=np.float64)
    t_op = np.asarray(t_op, dtype=np.float64)
    M, P = gamma.shape
    a = np.ones(M, dtype=np.complex128)
    b = np.zeros(M, dtype=np.complex128)
    for j in range(P - 1):
        a, b = _pulse_chain(gamma[:, j] + gamma_offset, omega0 * t_op[:, j] + delta_offset, a, b)
    damp = np.exp(-t_op.sum(axis=1) / t2)
    p0 = _p0_final(a, b, gamma[:, -1] + gamma_offset, omega0 * t_op[:, -1] + delta_offset, damp)
    return collision_p + (1.0 - collision_p) * p0
