"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from reupload import _pykernels
from reupload.circuit import label_states

try:
    from reupload import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    gen = np.random.default_rng(0)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])

    N, L = 1000, 4
    y = gen.uniform(-6, 6, (N, L))
    z = gen.uniform(-6, 6, (N, L))
    amps = label_states(4).amplitudes()
    print(f"fidelities: {N} samples, {L} layers, 4 labels")
    ref = _pykernels.fidelities(y, z, amps)
    for name, mod in backends:
        t = best_time(lambda: mod.fidelities(y, z, amps), args.repeat)
        err = np.abs(mod.fidelities(y, z, amps) - ref).max()
        print(f"  {name:<7}{1e6 * t:10.1f} us   max |diff| {err:.1e}")

    M, P, shots = 200, 5, 400
    gamma = gen.uniform(-6, 6, (M, P))
    t_op = gen.uniform(0, 25e-6, (M, P))
    keys = gen.integers(0, 2 ** 63, M).astype(np.uint64)
    noise = (2 * np.pi * 40e3, 2 * np.pi * 2e3, 0.02, 6e-3, 10e-9, 0.01, 0.2, 0.0, 5e-3)
    print(f"noisy_counts: {M} sequences x {shots} shots, {P} pulses")
    ref = _pykernels.noisy_counts(gamma, t_op, keys, shots, *noise)
    for name, mod in backends:
        t = best_time(lambda: mod.noisy_counts(gamma, t_op, keys, shots, *noise), args.repeat)
        same = all(np.array_equal(a, b) for a, b in zip(mod.noisy_counts(gamma, t_op, keys, shots, *noise), ref))
        print(f"  {name:<7}{1e9 * t / (M * shots):10.1f} ns/shot   counts identical: {same}")


if __name__ == "__main__":
    main()
