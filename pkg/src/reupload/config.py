"""Experiment configuration as plain ``key = value`` text.

Top-level keys configure the experiment; dotted keys configure a section::

    problem = circle
    layers = 4
    executor = emulator
    optimizer.method = derivative-free-evolutionary
    noise.collision_prob_per_shot = 0.01
    scan.grid = 7

``#`` starts a comment.  ``noise.*`` and ``hardware.*`` keys (and
``noise_file``) are only accepted with ``executor = emulator``; an exact
experiment carries no noise model at all.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .circuit import AnsatzKind
from .datasets import PROBLEMS, get_problem
from .emulator import HardwareProfile, NoiseConfig, calibrated_default
from .errors import ConfigError, InvalidArgumentError
from .training import OptimizerConfig, ScanConfig

EXECUTORS = ("exact", "emulator")
FINE_TUNE_SETS = ("test", "validation")


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark row.

    ``fine_tune_on`` picks the data the scan maximises accuracy on:
    ``test`` scans on the test sample itself (which leaks it into
    the tuned parameters), ``validation`` uses a separate sample of the
    same size.
    """

    problem: str = "circle"
    ansatz: str = ""  # empty: the problem's default ansatz
    layers: int = 4
    n_train: int = 200
    n_test: int = 1000
    seed: int = 0
    executor: str = "exact"
    shots: int = 100
    trials: int = 10
    fine_tune: bool = False
    fine_tune_on: str = "test"
    baselines: bool = False
    nn_epochs: int = 5000
    noise_file: str = ""
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    noise: NoiseConfig | None = None
    hardware: HardwareProfile | None = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError("problem", f"unknown problem {self.problem!r}")
        if not self.ansatz:
            object.__setattr__(self, "ansatz", get_problem(self.problem).ansatz)
        try:
            object.__setattr__(self, "ansatz", AnsatzKind.parse(self.ansatz).value)
        except InvalidArgumentError as exc:
            raise ConfigError("ansatz", str(exc)) from None
        if self.ansatz == "B" and get_problem(self.problem).dim != 2:
            raise ConfigError("ansatz", f"Ansatz B needs a 2-dimensional problem, {self.problem} is not")
        for name, low in (("layers", 1), ("n_train", 1), ("n_test", 1), ("trials", 1), ("shots", 1),
                          ("nn_epochs", 1)):
            if getattr(self, name) < low:
                raise ConfigError(name, f"must be >= {low}")
        if self.executor not in EXECUTORS:
            raise ConfigError("executor", f"expected one of {EXECUTORS}, got {self.executor!r}")
        if self.fine_tune_on not in FINE_TUNE_SETS:
            raise ConfigError("fine_tune_on", f"expected one of {FINE_TUNE_SETS}")
        if self.executor == "exact":
            if self.noise is not None or self.hardware is not None or self.noise_file:
                raise ConfigError("noise", "noise and hardware settings need executor = emulator")
        else:
            hw, noise = calibrated_default()
            if self.hardware is None:
                object.__setattr__(self, "hardware", hw)
            if self.noise is None:
                object.__setattr__(self, "noise", noise)


_SECTIONS = {"optimizer": OptimizerConfig, "scan": ScanConfig, "noise": NoiseConfig, "hardware": HardwareProfile}


def _coerce(key: str, annotation: str, text: str):
    text = text.strip()
    try:
        if annotation == "bool":
            low = text.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if annotation.startswith("int"):
            if annotation.endswith("None") and text.lower() in ("none", ""):
                return None
            return int(text)
        if annotation == "float":
            v = float(text)
            if not math.isfinite(v):
                raise ValueError(text)
            return v
        return text
    except ValueError:
        raise ConfigError(key, f"cannot read {text!r} as {annotation}") from None


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _section_fields(cls):
    return {f.name: f.type for f in fields(cls)}


def parse_pairs(text: str) -> list[tuple[str, str, int]]:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        k, v = line.split("=", 1)
        pairs.append((k.strip(), v.strip(), lineno))
    return pairs


def load_noise_file(path) -> NoiseConfig:
    """Noise profile from a key = value file with NoiseConfig field names."""
    text = Path(path).read_text()
    known = _section_fields(NoiseConfig)
    values = {}
    for k, v, _ in parse_pairs(text):
        k = k[len("noise."):] if k.startswith("noise.") else k
        if k not in known:
            raise ConfigError(f"noise.{k}", "unknown noise field")
        values[k] = _coerce(f"noise.{k}", known[k], v)
    try:
        return NoiseConfig(**values)
    except TypeError as exc:
        raise ConfigError("noise", str(exc)) from None


def from_pairs(pairs, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply ``(key, value)`` overrides to ``base`` (defaults when None)."""
    top = {f.name: f.type for f in fields(ExperimentConfig) if f.name not in _SECTIONS}
    values: dict = {}
    sections: dict = {name: {} for name in _SECTIONS}
    for item in pairs:
        k, v = item[0], item[1]
        if "." in k:
            sec, sub = k.split(".", 1)
            if sec not in _SECTIONS:
                raise ConfigError(k, "unknown section")
            known = _section_fields(_SECTIONS[sec])
            if sub not in known:
                raise ConfigError(k, "unknown field")
            sections[sec][sub] = _coerce(k, known[sub], v)
        elif k in top:
            values[k] = _coerce(k, top[k], v)
        else:
            raise ConfigError(k, "unknown key")

    base = base or ExperimentConfig()
    executor = values.get("executor", base.executor)
    if executor == "exact" and (sections["noise"] or sections["hardware"] or values.get("noise_file")):
        raise ConfigError("noise", "noise and hardware settings need executor = emulator")
    merged = {f.name: getattr(base, f.name) for f in fields(ExperimentConfig)}
    merged.update(values)
    if executor == "exact":
        merged["noise"] = None
        merged["hardware"] = None
        merged["noise_file"] = ""
    else:
        hw_default, noise_default = calibrated_default()
        noise = merged["noise"] or noise_default
        if values.get("noise_file"):
            noise = load_noise_file(values["noise_file"])
        merged["noise"] = noise
        merged["hardware"] = merged["hardware"] or hw_default
    for sec, cls in _SECTIONS.items():
        if sections[sec]:
            current = merged[sec]
            try:
                merged[sec] = replace(current, **sections[sec])
            except TypeError as exc:
                raise ConfigError(sec, str(exc)) from None
    return ExperimentConfig(**merged)


def parse(text: str) -> ExperimentConfig:
    return from_pairs(parse_pairs(text))


def serialize(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if f.name in _SECTIONS:
            if v is None:
                continue
            for sf in fields(v):
                lines.append(f"{f.name}.{sf.name} = {_fmt(getattr(v, sf.name))}")
        else:
            lines.append(f"{f.name} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(serialize(cfg).encode()).hexdigest()[:16]
