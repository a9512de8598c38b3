"""Offline fit of the emulator's systematic over-rotation.

The per-pulse stochastic widths come from hardware specifications (2 kHz
detuning drift, 10 ns timing jitter, 0.1 % phase noise) and, for a 4-layer
circle model, cost well under one accuracy point at 100 shots.  The
remaining drop seen on hardware is attributed to a systematic rotation-angle
error, which is also what the pairwise scan is able to undo.  The procedure:

1. train the circle problem at four layers for seeds ``0..4`` and keep the
   model with the best exact test accuracy;
2. for each candidate ``systematic_delta_offset``, measure the emulated test
   accuracy over ``trials`` shot trials at 100 shots;
3. keep the candidate whose mean accuracy gap is closest to ``target_gap``.

``calibrated_default`` hard-codes the outcome so that runs do not depend on
re-fitting.
"""
from __future__ import annotations

import numpy as np

from .circuit import label_states
from .datasets import train_test
from .emulator import EmulatorExecutor, calibrated_default
from .training import OptimizerConfig, evaluate, train_simulated


def calibrate(offsets=(0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3), target_gap: float = 0.04, seeds=range(5),
              trials: int = 10, shots: int = 100, optimizer: OptimizerConfig | None = None) -> dict:
    labels = label_states(2)
    best = None
    for s in seeds:
        train, test = train_test("circle", seed=s)
        rep = train_simulated("circle", 4, "A", train, optimizer, seed=s, test=test, labels=labels)
        if best is None or rep.test_accuracy > best[0]:
            best = (rep.test_accuracy, rep.theta_sim, test, s)
    acc_star, theta, test, seed = best
    hw, noise = calibrated_default()
    rows = []
    for off in offsets:
        ex = EmulatorExecutor(hw, noise.with_(systematic_delta_offset=float(off), shots=shots), seed=seed)
        accs = [evaluate(theta, test, labels, ex, trial=t)[0] for t in range(trials)]
        rows.append({"systematic_delta_offset": float(off), "acc_sim": float(np.mean(accs)),
                     "std": float(np.std(accs, ddof=1)), "gap": float(acc_star - np.mean(accs))})
    chosen = min(rows, key=lambda r: abs(r["gap"] - target_gap))
    return {"seed": seed, "acc_star": acc_star, "candidates": rows, "chosen": chosen}
