import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reupload.core import (QubitState, RotationParams, Unitary, apply, arb_rotation, overlap_prob, rx, ry,
                           rz)
from reupload.errors import InvalidArgumentError

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)


def close(u: Unitary, m, tol=1e-12):
    return np.max(np.abs(u.matrix - np.asarray(m))) < tol


def test_zero_angle_rotation_is_identity():
    assert close(arb_rotation(RotationParams(1.7, 0.0)), np.eye(2))


def test_pi_pulse_about_y_flips_zero():
    s = apply(arb_rotation(RotationParams(math.pi / 2, math.pi)), QubitState.zero())
    assert abs(s.amp0) < 1e-15
    assert abs(s.amp1 - 1) < 1e-15


def test_decomposition_example():
    u = arb_rotation(RotationParams(0.3, 1.1))
    assert close(u, (rz(0.3) @ rx(1.1) @ rz(-0.3)).matrix)


def test_rz_values():
    assert close(rz(0.0), np.eye(2))
    assert close(rz(2 * math.pi), -np.eye(2))
    for t in (0.1, 1.0, -7.0):
        assert abs(abs(rz(t).a) ** 2 - 1) < 1e-15


def test_ry_values():
    assert close(ry(0.0), np.eye(2))
    s = apply(ry(math.pi), QubitState.zero())
    assert abs(abs(s.amp1) - 1) < 1e-15
    assert abs(apply(ry(math.pi / 2), QubitState.zero()).p0 - 0.5) < 1e-15


def test_ry_is_real_rotation():
    # matches the textbook [[c, -s], [s, c]]
    t = 0.77
    want = [[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]]
    assert close(ry(t), want)


def test_apply_identity_and_flip():
    s = QubitState(0.6 + 0j, 0.8j)
    assert apply(Unitary.identity(), s) == s
    t = apply(ry(math.pi), QubitState.zero())
    assert overlap_prob(t, QubitState.one()) == pytest.approx(1.0, abs=1e-15)


def test_overlap_examples():
    z = QubitState.zero()
    assert overlap_prob(z, z) == 1.0
    assert overlap_prob(z, QubitState.one()) == 0.0
    assert overlap_prob(z, apply(ry(math.pi / 2), z)) == pytest.approx(0.5, abs=1e-15)


def test_bloch_vector_of_basis_states():
    assert QubitState.zero().bloch() == (0.0, 0.0, 1.0)
    assert QubitState.one().bloch() == (0.0, 0.0, -1.0)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_angles_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        arb_rotation(RotationParams(bad, 0.1))
    with pytest.raises(InvalidArgumentError):
        rz(bad)


@given(angles, angles)
def test_unitarity(g, d):
    for u in (arb_rotation(RotationParams(g, d)), rz(g), ry(d), rx(d)):
        assert u.unitarity_error() < 1e-12


@given(angles, angles)
def test_decomposition_identity(g, d):
    assert close(arb_rotation(RotationParams(g, d)), (rz(g) @ rx(d) @ rz(-g)).matrix)


@given(st.lists(st.tuples(st.sampled_from("xyzr"), angles, angles), min_size=1, max_size=100))
def test_norm_preserved_by_gate_chains(chain):
    s = QubitState.zero()
    for kind, a, b in chain:
        u = {"x": lambda: rx(a), "y": lambda: ry(a), "z": lambda: rz(a),
             "r": lambda: arb_rotation(RotationParams(a, b))}[kind]()
        s = apply(u, s)
    assert abs(s.norm_sq - 1) < 1e-12


@given(angles, angles, angles, angles, st.floats(0, 2 * math.pi))
def test_global_phase_insensitivity(a1, a2, b1, b2, phase):
    a = apply(ry(a1) @ rz(a2), QubitState.zero())
    b = apply(rz(b2) @ ry(b1), QubitState.zero())
    w = cmath.exp(1j * phase)
    base = overlap_prob(a, b)
    assert abs(overlap_prob(QubitState(w * a.amp0, w * a.amp1), b) - base) < 1e-12
    assert abs(overlap_prob(a, QubitState(w * b.amp0, w * b.amp1)) - base) < 1e-12


@given(angles)
def test_rz_keeps_zero_population(t):
    assert abs(apply(rz(t), QubitState.zero()).p0 - 1) < 1e-12
