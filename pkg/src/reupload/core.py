"""Exact single-qubit states, rotation gates and overlap probabilities.

Conventions::

    R(gamma, delta) = [[cos(delta/2),                  -i e^{-i gamma} sin(delta/2)],
                       [-i e^{i gamma} sin(delta/2),    cos(delta/2)              ]]
    Rz(t) = diag(e^{-i t/2}, e^{i t/2})
    Ry(t) = R(pi/2, t)
    Rx(t) = R(0, t)

With these, ``R(gamma, delta) == Rz(gamma) @ Rx(delta) @ Rz(-gamma)`` holds
exactly.  All observables downstream are overlap probabilities, so the
global phase of any gate is irrelevant.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


def _finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"angle must be finite, got {v!r}")


@dataclass(frozen=True)
class QubitState:
    """Normalised pure state ``amp0 |0> + amp1 |1>``."""

    amp0: complex
    amp1: complex

    @classmethod
    def zero(cls) -> QubitState:
        return cls(1.0 + 0j, 0j)

    @classmethod
    def one(cls) -> QubitState:
        return cls(0j, 1.0 + 0j)

    @property
    def norm_sq(self) -> float:
        return abs(self.amp0) ** 2 + abs(self.amp1) ** 2

    @property
    def p0(self) -> float:
        """Probability of measuring |0>."""
        return min(1.0, max(0.0, abs(self.amp0) ** 2))

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=np.complex128)

    def bloch(self) -> tuple[float, float, float]:
        """Bloch vector (x, y, z)."""
        c = self.amp0.conjugate() * self.amp1
        return (2 * c.real, 2 * c.imag, abs(self.amp0) ** 2 - abs(self.amp1) ** 2)


@dataclass(frozen=True)
class Unitary:
    """2x2 matrix ``[[a, b], [c, d]]``."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> Unitary:
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @classmethod
    def from_matrix(cls, m) -> Unitary:
        m = np.asarray(m, dtype=np.complex128)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    def dagger(self) -> Unitary:
        return Unitary(self.a.conjugate(), self.c.conjugate(), self.b.conjugate(), self.d.conjugate())

    def __matmul__(self, other: Unitary) -> Unitary:
        return Unitary(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def unitarity_error(self) -> float:
        """Max entrywise deviation of U^dagger U from the identity."""
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))


@dataclass(frozen=True)
class RotationParams:
    """One arbitrary-axis pulse: azimuth ``gamma`` and rotation angle ``delta`` (radians)."""

    gamma: float
    delta: float


def arb_rotation(p: RotationParams) -> Unitary:
    """Rotation by ``p.delta`` about the equatorial axis at azimuth ``p.gamma``."""
    _finite(p.gamma, p.delta)
    c = math.cos(p.delta / 2)
    s = math.sin(p.delta / 2)
    return Unitary(
        complex(c),
        -1j * cmath.exp(-1j * p.gamma) * s,
        -1j * cmath.exp(1j * p.gamma) * s,
        complex(c),
    )


def rz(theta: float) -> Unitary:
    _finite(theta)
    return Unitary(cmath.exp(-0.5j * theta), 0j, 0j, cmath.exp(0.5j * theta))


def ry(theta: float) -> Unitary:
    return arb_rotation(RotationParams(math.pi / 2, theta))


def rx(theta: float) -> Unitary:
    return arb_rotation(RotationParams(0.0, theta))


def apply(u: Unitary, s: QubitState) -> QubitState:
    """Matrix-vector product ``u |s>``."""
    return QubitState(u.a * s.amp0 + u.b * s.amp1, u.c * s.amp0 + u.d * s.amp1)


def overlap_prob(a: QubitState, b: QubitState) -> float:
    """``|<a|b>|^2`` clamped to [0, 1]."""
    inner = a.amp0.conjugate() * b.amp0 + a.amp1.conjugate() * b.amp1
    return min(1.0, max(0.0, abs(inner) ** 2))
