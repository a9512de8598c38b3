"""Counter-based SplitMix64 streams.

Every random draw in the package is addressed as ``(key, counter)``: the
value is output number ``counter + 1`` of a SplitMix64 generator seeded
with ``key``.  Random access makes results independent of evaluation
order, and the integer arithmetic is identical in the numpy fallback and
the compiled kernels, so both backends see the same bits.
"""
from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 output finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(*parts: int | str) -> int:
    """Fold integers and strings into one 64-bit stream key.

    Strings are hashed with BLAKE2b so keys do not depend on Python's
    per-process hash randomisation.
    """
    key = 0
    for part in parts:
        if isinstance(part, str):
            part = int.from_bytes(hashlib.blake2b(part.encode(), digest_size=8).digest(), "little")
        key = mix64(key + GOLDEN + (int(part) & MASK64))
    return key


def raw(key: int, counters) -> np.ndarray:
    """Vectorised 64-bit outputs for the given counters."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK64) + (c + np.uint64(1)) * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniform(key: int, counters) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits."""
    return (raw(key, counters) >> np.uint64(11)).astype(np.float64) * _INV53


def box_muller(u1: np.ndarray, u2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two standard normals from two [0, 1) uniforms.

    ``1 - u1`` lies in (0, 1], so the logarithm is always finite.
    """
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    t = 2.0 * np.pi * u2
    return r * np.cos(t), r * np.sin(t)


def normal_pair(key: int, counter: int) -> tuple[float, float]:
    """Two standard normals from counters ``counter`` and ``counter + 1``."""
    u = uniform(key, [counter, counter + 1])
    a, b = box_muller(u[:1], u[1:])
    return float(a[0]), float(b[0])
