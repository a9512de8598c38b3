"""Re-uploading circuits, label states and depth-halving pulse fusion.

A layer is ``Rz(z) Ry(y)`` with data-dependent angles:

* Ansatz A (any dimension ``d``): ``y = w . x + alpha``, ``z = phi``
* Ansatz B (``d == 2`` only):      ``y = nu x1 + alpha``, ``z = omega x2 + beta``

Layer 1 acts first on |0>.

Fusion compiles ``L`` layers plus the inverse label gate into ``L + 1``
arbitrary-axis pulses ``R(gamma, delta)`` executed in order on |0>:

* pulse 1: ``(pi/2, y_1)``
* pulse n, 2 <= n <= L: ``(pi/2 + Z_{n-1}, y_n)`` with ``Z_m = z_1 + ... + z_m``
* pulse L+1: ``(pi/2 + Z_L - eta_c, -lambda_c)``

The emitted pulses are the entrywise complex conjugates of the pulses one
gets by commuting every ``Rz`` to the end of the circuit.  Conjugating the
whole product leaves ``P0`` unchanged, and it gives the azimuth recurrence
``gamma_{n+1} = gamma_n + z_n`` with ``gamma_2 = pi/2 + z_1``.  The trailing
``Rz`` of the commuted circuit acts just before measurement and is dropped.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .core import QubitState, RotationParams, Unitary, apply, arb_rotation, overlap_prob, ry, rz
from .errors import InvalidArgumentError


class AnsatzKind(str, enum.Enum):
    A = "A"
    B = "B"

    @classmethod
    def parse(cls, value) -> AnsatzKind:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise InvalidArgumentError(f"unknown ansatz {value!r}; expected A or B") from None


def params_per_layer(ansatz: AnsatzKind, dim: int) -> int:
    return dim + 2 if AnsatzKind.parse(ansatz) is AnsatzKind.A else 4


@dataclass(frozen=True)
class LayerA:
    """Ansatz A layer: ``Rz(phi) Ry(weights . x + alpha)``."""

    weights: tuple[float, ...]
    alpha: float
    phi: float

    def values(self) -> list[float]:
        return [*self.weights, self.alpha, self.phi]


@dataclass(frozen=True)
class LayerB:
    """Ansatz B layer: ``Rz(omega x2 + beta) Ry(nu x1 + alpha)``."""

    nu: float
    alpha: float
    omega: float
    beta: float

    def values(self) -> list[float]:
        return [self.nu, self.alpha, self.omega, self.beta]


LayerParams = Union[LayerA, LayerB]


@dataclass(frozen=True)
class ParameterSet:
    """Trainable parameters of an ``L``-layer circuit.

    The canonical flat order is layer-major; within a layer it is
    ``w_1..w_d, alpha, phi`` for Ansatz A and ``nu, alpha, omega, beta``
    for Ansatz B.
    """

    ansatz: AnsatzKind
    dim: int
    layers: tuple[LayerParams, ...]

    def __post_init__(self):
        object.__setattr__(self, "ansatz", AnsatzKind.parse(self.ansatz))
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.ansatz is AnsatzKind.B and self.dim != 2:
            raise InvalidArgumentError(f"Ansatz B requires dim == 2, got {self.dim}")
        if self.dim < 1:
            raise InvalidArgumentError("dim must be >= 1")
        if not self.layers:
            raise InvalidArgumentError("a parameter set needs at least one layer")
        want = LayerA if self.ansatz is AnsatzKind.A else LayerB
        for i, layer in enumerate(self.layers):
            if not isinstance(layer, want):
                raise InvalidArgumentError(f"layer {i} is {type(layer).__name__}, expected {want.__name__}")
            if want is LayerA and len(layer.weights) != self.dim:
                raise InvalidArgumentError(f"layer {i} has {len(layer.weights)} weights, expected {self.dim}")
            if not all(math.isfinite(v) for v in layer.values()):
                raise InvalidArgumentError(f"layer {i} has non-finite entries")

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def n_params(self) -> int:
        return self.n_layers * params_per_layer(self.ansatz, self.dim)

    def to_vector(self) -> np.ndarray:
        return np.array([v for layer in self.layers for v in layer.values()], dtype=float)

    @classmethod
    def from_vector(cls, ansatz, dim: int, vec) -> ParameterSet:
        ansatz = AnsatzKind.parse(ansatz)
        vec = np.asarray(vec, dtype=float).ravel()
        per = params_per_layer(ansatz, dim)
        if vec.size == 0 or vec.size % per:
            raise InvalidArgumentError(f"vector of length {vec.size} does not fit layers of {per} parameters")
        layers = []
        for row in vec.reshape(-1, per):
            row = [float(v) for v in row]
            if ansatz is AnsatzKind.A:
                layers.append(LayerA(tuple(row[:dim]), row[dim], row[dim + 1]))
            else:
                layers.append(LayerB(*row))
        return cls(ansatz, dim, tuple(layers))

    @classmethod
    def zeros(cls, ansatz, dim: int, n_layers: int) -> ParameterSet:
        return cls.from_vector(ansatz, dim, np.zeros(n_layers * params_per_layer(ansatz, dim)))

    def param_names(self) -> list[str]:
        per = ["w%d" % (j + 1) for j in range(self.dim)] + ["alpha", "phi"]
        if self.ansatz is AnsatzKind.B:
            per = ["nu", "alpha", "omega", "beta"]
        return [f"layer{i + 1}.{name}" for i in range(self.n_layers) for name in per]

    def to_dict(self) -> dict:
        return {
            "ansatz": self.ansatz.value,
            "dim": self.dim,
            "layers": [layer.values() for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ParameterSet:
        try:
            vec = [v for layer in d["layers"] for v in layer]
            return cls.from_vector(d["ansatz"], int(d["dim"]), vec)
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed parameter checkpoint: {exc}") from None


def _check_points(ansatz: AnsatzKind, dim: int, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != dim:
        raise InvalidArgumentError(f"feature dimension {X.shape[1]} does not match dim={dim}")
    if ansatz is AnsatzKind.B and dim != 2:
        raise InvalidArgumentError("Ansatz B requires dim == 2")
    return X


def layer_angles(ansatz, dim: int, vec, X) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample Ry and Rz angles, each of shape ``(N, L)``."""
    ansatz = AnsatzKind.parse(ansatz)
    X = _check_points(ansatz, dim, X)
    per = params_per_layer(ansatz, dim)
    P = np.asarray(vec, dtype=float).reshape(-1, per)
    if ansatz is AnsatzKind.A:
        y = X @ P[:, :dim].T + P[:, dim]
        z = np.broadcast_to(P[:, dim + 1], y.shape)
    else:
        y = np.outer(X[:, 0], P[:, 0]) + P[:, 1]
        z = np.outer(X[:, 1], P[:, 2]) + P[:, 3]
    return np.ascontiguousarray(y), np.ascontiguousarray(z)


def layer_unitary(ansatz, theta: LayerParams, x) -> Unitary:
    """``Rz(z) Ry(y)`` for one layer at feature vector ``x``."""
    ansatz = AnsatzKind.parse(ansatz)
    x = np.asarray(x, dtype=float).ravel()
    if ansatz is AnsatzKind.A:
        if not isinstance(theta, LayerA) or len(theta.weights) != x.size:
            raise InvalidArgumentError("Ansatz A layer does not match the feature vector")
        y = float(np.dot(theta.weights, x)) + theta.alpha
        z = theta.phi
    else:
        if not isinstance(theta, LayerB) or x.size != 2:
            raise InvalidArgumentError("Ansatz B needs a LayerB and a 2-dimensional feature vector")
        y = theta.nu * x[0] + theta.alpha
        z = theta.omega * x[1] + theta.beta
    return rz(z) @ ry(y)


def circuit_state(theta: ParameterSet, x) -> QubitState:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != theta.dim:
        raise InvalidArgumentError(f"feature dimension {x.size} does not match dim={theta.dim}")
    state = QubitState.zero()
    for layer in theta.layers:
        state = apply(layer_unitary(theta.ansatz, layer, x), state)
    return state


@dataclass(frozen=True)
class LabelStateSet:
    """Target states ``|phi_c> = Rz(eta_c) Ry(lambda_c) |0>``."""

    k: int
    gates: tuple[tuple[float, float], ...]  # (lambda, eta) per class
    states: tuple[QubitState, ...]

    def amplitudes(self) -> np.ndarray:
        return np.array([s.as_array() for s in self.states])


def label_states(k: int) -> LabelStateSet:
    """Maximally separated label states for 2, 3 or 4 classes."""
    third = 2 * math.pi / 3
    if k == 2:
        gates = [(0.0, 0.0), (math.pi, 0.0)]
    elif k == 3:
        gates = [(0.0, 0.0), (third, 0.0), (2 * third, 0.0)]
    elif k == 4:
        tet = math.acos(-1.0 / 3.0)
        gates = [(0.0, 0.0), (tet, 0.0), (tet, third), (tet, 2 * third)]
    else:
        raise InvalidArgumentError(f"label states are defined for k in {{2, 3, 4}}, got {k}")
    states = tuple(apply(rz(eta) @ ry(lam), QubitState.zero()) for lam, eta in gates)
    return LabelStateSet(k, tuple(gates), states)


@dataclass(frozen=True)
class FusedSequence:
    """Compiled pulse list; ``meta`` is the originating ``(x, theta, c)`` when known."""

    pulses: tuple[RotationParams, ...]
    meta: tuple | None = None

    def __len__(self) -> int:
        return len(self.pulses)

    def as_array(self) -> np.ndarray:
        return np.array([[p.gamma, p.delta] for p in self.pulses], dtype=float).reshape(-1, 2)

    def to_text(self) -> str:
        return "".join(f"{p.gamma:.17g},{p.delta:.17g}\n" for p in self.pulses)

    @classmethod
    def from_text(cls, text: str) -> FusedSequence:
        pulses = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise InvalidArgumentError(f"line {lineno}: expected 'gamma,delta'")
            try:
                g, d = float(parts[0]), float(parts[1])
            except ValueError:
                raise InvalidArgumentError(f"line {lineno}: not a number") from None
            if not (math.isfinite(g) and math.isfinite(d)):
                raise InvalidArgumentError(f"line {lineno}: non-finite angle")
            pulses.append(RotationParams(g, d))
        if not pulses:
            raise InvalidArgumentError("empty pulse sequence")
        return cls(tuple(pulses))


def _check_class(c: int, labels: LabelStateSet) -> None:
    if not 0 <= c < labels.k:
        raise InvalidArgumentError(f"class {c} out of range for {labels.k} labels")


def fuse(theta: ParameterSet, x, c: int, labels: LabelStateSet) -> FusedSequence:
    """Compile the circuit for ``x`` plus ``V_c^dagger`` into ``L + 1`` pulses."""
    _check_class(c, labels)
    x = np.asarray(x, dtype=float).ravel()
    y, z = layer_angles(theta.ansatz, theta.dim, theta.to_vector(), x[None, :])
    y, z = y[0], z[0]
    lam, eta = labels.gates[c]
    pulses = [RotationParams(math.pi / 2, float(y[0]))]
    azimuth = math.pi / 2
    for n in range(1, theta.n_layers):
        azimuth = azimuth + float(z[n - 1])
        pulses.append(RotationParams(azimuth, float(y[n])))
    azimuth = azimuth + float(z[-1])
    pulses.append(RotationParams(azimuth - eta, -lam))
    return FusedSequence(tuple(pulses), meta=(tuple(x), theta, c))


def fused_pulse_arrays(ansatz, dim: int, vec, X, labels: LabelStateSet) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``fuse`` for every sample and every class.

    Returns ``(gamma, delta)`` arrays of shape ``(N, k, L + 1)``.
    """
    y, z = layer_angles(ansatz, dim, vec, X)
    N, L = y.shape
    az = np.empty((N, L + 1))
    az[:, 0] = math.pi / 2
    az[:, 1:] = math.pi / 2 + np.cumsum(z, axis=1)
    gates = np.asarray(labels.gates)
    gamma = np.repeat(az[:, None, :], labels.k, axis=1)
    gamma[:, :, L] -= gates[:, 1]
    delta = np.empty((N, labels.k, L + 1))
    delta[:, :, :L] = y[:, None, :]
    delta[:, :, L] = -gates[:, 0]
    return gamma, delta


def run_exact(seq: FusedSequence) -> float:
    """P0 after executing the pulses in order on |0>."""
    state = QubitState.zero()
    for p in seq.pulses:
        state = apply(arb_rotation(p), state)
    return state.p0


class ExactExecutor:
    """Noise-free state-vector execution."""

    name = "exact"

    def p0(self, seq: FusedSequence, key: int = 0) -> float:
        return run_exact(seq)

    def fidelity_matrix(self, theta: ParameterSet, X, labels: LabelStateSet, *, trial: int = 0) -> np.ndarray:
        """``|<phi_c|psi(x)>|^2`` for every sample (rows) and class (columns)."""
        return fidelity_matrix(theta.ansatz, theta.dim, theta.to_vector(), X, labels)


def fidelity_matrix(ansatz, dim: int, vec, X, labels: LabelStateSet) -> np.ndarray:
    y, z = layer_angles(ansatz, dim, vec, X)
    return kernels.fidelities(y, z, labels.amplitudes())


def measured_fidelity(seq: FusedSequence, executor=None, key: int = 0) -> float:
    """P0 of the fused sequence, i.e. the fidelity to the absorbed label state."""
    executor = executor or ExactExecutor()
    return executor.p0(seq, key)


def direct_fidelity(theta: ParameterSet, x, c: int, labels: LabelStateSet) -> float:
    _check_class(c, labels)
    return overlap_prob(labels.states[c], circuit_state(theta, x))


def unfused_p0(theta: ParameterSet, x, c: int, labels: LabelStateSet) -> float:
    """Oracle: elementary gates of every layer, then ``Rz(-eta) Ry(-lambda)``."""
    _check_class(c, labels)
    state = circuit_state(theta, x)
    lam, eta = labels.gates[c]
    state = apply(ry(-lam) @ rz(-eta), state)
    return state.p0


def elementary_gate_count(theta: ParameterSet) -> int:
    """Rotations in the unfused circuit: two per layer plus two for ``V_c^dagger``."""
    return 2 * theta.n_layers + 2

