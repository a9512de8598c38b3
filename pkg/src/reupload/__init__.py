"""Single-qubit data re-uploading classifier: simulation, pulse fusion, training and a noisy emulator."""
from .circuit import (
    AnsatzKind,
    ExactExecutor,
    FusedSequence,
    LabelStateSet,
    LayerA,
    LayerB,
    ParameterSet,
    circuit_state,
    fuse,
    label_states,
    layer_unitary,
    measured_fidelity,
)
from .classifier import accuracy, chi2_loss, class_probabilities, guess_class
from .core import QubitState, RotationParams, Unitary, apply, arb_rotation, overlap_prob, rx, ry, rz
from .datasets import Dataset, Problem, class_balance, label_point, sample_dataset
from .emulator import EmulatorExecutor, HardwareProfile, NoiseConfig, ShotOutcome, calibrated_default, noisy_execute
from .errors import ConfigError, DegenerateInputError, InvalidArgumentError, ReuploadError, TrainingFailure, UnsupportedError
from .kernels import BACKEND
from .training import OptimizerConfig, ScanConfig, TrainReport, evaluate, fd_gradient, fine_tune, train_simulated

__version__ = "0.1.0"
