import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reupload import _pykernels, kernels
from reupload.circuit import label_states

ck = pytest.importorskip("reupload._ckernels")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@given(st.integers(0, 150), st.integers(0, 6), st.sampled_from([2, 3, 4]), st.integers(0, 2 ** 32 - 1))
def test_fidelities_agree(N, L, k, seed):
    r = np.random.default_rng(seed)
    y = r.uniform(-20, 20, (N, L))
    z = r.uniform(-20, 20, (N, L))
    amps = label_states(k).amplitudes()
    a = ck.fidelities(y, z, amps)
    b = _pykernels.fidelities(y, z, amps)
    assert a.shape == b.shape == (N, k)
    assert np.max(np.abs(a - b), initial=0.0) < 1e-13


def test_fidelities_accept_read_only_input():
    y = np.zeros((3, 2))
    z = np.broadcast_to(np.array([0.1, 0.2]), (3, 2))
    y.flags.writeable = False
    out = ck.fidelities(y, np.ascontiguousarray(z), label_states(2).amplitudes())
    assert np.allclose(out[:, 0], 1.0)


@given(st.integers(1, 6), st.integers(1, 5), st.integers(1, 130), st.integers(0, 2 ** 32 - 1))
def test_noisy_counts_agree(M, P, shots, seed):
    r = np.random.default_rng(seed)
    gamma = r.uniform(-3, 3, (M, P))
    t_op = r.uniform(0, 25e-6, (M, P))
    keys = r.integers(0, 2 ** 63, M).astype(np.uint64)
    args = (2 * np.pi * 40e3, 2 * np.pi * 3e3, 0.03, 0.01, 20e-9, 0.05, 0.1, -0.02, 5e-3)
    a = ck.noisy_counts(gamma, t_op, keys, shots, *args)
    b = _pykernels.noisy_counts(gamma, t_op, keys, shots, *args)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_pure_python_switch():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-c", "from reupload import kernels; print(kernels.BACKEND)"],
                         env={"REUPLOAD_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
