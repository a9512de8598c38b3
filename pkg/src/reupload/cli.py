"""Command-line entry point (``reupload``).

Exit codes: 0 success, 1 configuration or input error, 2 training failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, config
from .circuit import ExactExecutor, FusedSequence, ParameterSet, fuse, label_states
from .datasets import PROBLEMS, get_problem, sample_dataset, train_test
from .errors import InvalidArgumentError, TrainingFailure

# shorthand flags -> config keys
_FLAGS = {
    "problem": "problem",
    "ansatz": "ansatz",
    "layers": "layers",
    "seed": "seed",
    "n_train": "n_train",
    "n_test": "n_test",
    "executor": "executor",
    "shots": "shots",
    "trials": "trials",
    "noise_file": "noise_file",
    "method": "optimizer.method",
    "max_evaluations": "optimizer.max_evaluations",
    "restarts": "optimizer.restarts",
}


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value experiment file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--ansatz", choices=["A", "B"])
    p.add_argument("--layers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--executor", choices=["exact", "emulator"])
    p.add_argument("--shots", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--noise-file", dest="noise_file")
    p.add_argument("--method", choices=["derivative-free-evolutionary", "quasi-newton-bounded"])
    p.add_argument("--max-evaluations", dest="max_evaluations", type=int)
    p.add_argument("--restarts", type=int)


def build_config(args) -> config.ExperimentConfig:
    pairs = []
    if args.config:
        pairs.extend(config.parse_pairs(Path(args.config).read_text()))
    for flag, key in _FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            pairs.append((key, str(v), 0))
    for item in args.set:
        if "=" not in item:
            raise config.ConfigError(item, "expected KEY=VALUE")
        k, v = item.split("=", 1)
        pairs.append((k.strip(), v.strip(), 0))
    for flag, key in (("fine_tune", "fine_tune"), ("baselines", "baselines")):
        if getattr(args, flag, False):
            pairs.append((key, "true", 0))
    return config.from_pairs(pairs)


def _executor(cfg: config.ExperimentConfig):
    if cfg.executor == "exact":
        return ExactExecutor()
    from .emulator import EmulatorExecutor

    return EmulatorExecutor(cfg.hardware, cfg.noise.with_(shots=cfg.shots), seed=cfg.seed)


def _load_theta(path) -> ParameterSet:
    return ParameterSet.from_dict(json.loads(Path(path).read_text()))


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_train(args) -> int:
    from .training import train_simulated

    cfg = build_config(args)
    train, test = train_test(cfg.problem, cfg.n_train, cfg.n_test, cfg.seed)
    rep = train_simulated(cfg.problem, cfg.layers, cfg.ansatz, train, cfg.optimizer, seed=cfg.seed, test=test)
    if args.checkpoint:
        Path(args.checkpoint).write_text(json.dumps(rep.theta_sim.to_dict(), indent=2) + "\n")
    _emit(rep.to_json() + "\n", args.out)
    return 0


def cmd_run(args) -> int:
    cfg = build_config(args)
    row = bench.run_experiment(cfg, out_dir=args.out_dir)
    _emit(bench.dumps_report(row), args.out)
    return 0


def cmd_evaluate(args) -> int:
    from .training import evaluate

    cfg = build_config(args)
    theta = _load_theta(args.theta)
    p = get_problem(cfg.problem)
    _, test = train_test(p, cfg.n_train, cfg.n_test, cfg.seed)
    labels = label_states(p.classes)
    ex = _executor(cfg)
    trials = 1 if cfg.executor == "exact" else cfg.trials
    accs = [evaluate(theta, test, labels, ex, trial=t)[0] for t in range(trials)]
    out = {"problem": p.name, "executor": cfg.executor, "config_hash": config.config_hash(cfg),
           "seed": cfg.seed, "accuracy": accs, "mean": float(np.mean(accs))}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def cmd_fine_tune(args) -> int:
    from .training import evaluate, fine_tune

    cfg = build_config(args)
    if cfg.executor != "emulator":
        cfg = config.from_pairs([("executor", "emulator", 0)], cfg)
    theta = _load_theta(args.theta)
    p = get_problem(cfg.problem)
    _, test = train_test(p, cfg.n_train, cfg.n_test, cfg.seed)
    labels = label_states(p.classes)
    ex = _executor(cfg)
    theta_q, trace = fine_tune(theta, ex, test, labels, cfg.scan, trial=bench.SCAN_TRIAL)
    if args.checkpoint:
        Path(args.checkpoint).write_text(json.dumps(theta_q.to_dict(), indent=2) + "\n")
    accs = [evaluate(theta_q, test, labels, ex, trial=t)[0] for t in range(cfg.trials)]
    out = {"theta_q": theta_q.to_dict(), "accuracy_trace": trace, "acc_q": accs, "mean": float(np.mean(accs)),
           "config_hash": config.config_hash(cfg), "seed": cfg.seed}
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def cmd_grid(args) -> int:
    theta = _load_theta(args.theta)
    k = args.classes
    if k is None:
        k = get_problem(args.problem).classes if args.problem else 2
    text = bench.export_boundary_grid(theta, label_states(k), args.resolution)
    _emit(text, args.out)
    return 0


def cmd_table(args) -> int:
    problems = args.problems.split(",") if args.problems else None
    rep = bench.reproduce_table(args.out, seed=args.seed or 0, problems=problems, out_dir=args.out_dir)
    print(rep["table"])
    return 0


def cmd_sweep(args) -> int:
    layers = [int(v) for v in args.layer_list.split(",")]
    rows = bench.layer_sweep(args.problem or "circle", layers, range(args.seeds))
    _emit(bench.dumps_report({"rows": rows}), args.out)
    return 0


def cmd_dataset(args) -> int:
    p = get_problem(args.problem or "circle")
    _emit(sample_dataset(p, args.n, args.seed or 0).to_csv(), args.out)
    return 0


def cmd_fuse(args) -> int:
    theta = _load_theta(args.theta)
    x = [float(v) for v in args.x.split(",")]
    k = args.classes or 2
    _emit(fuse(theta, x, args.cls, label_states(k)).to_text(), args.out)
    return 0


def cmd_emulate(args) -> int:
    from .emulator import calibrated_default, noisy_execute

    seq = FusedSequence.from_text(Path(args.sequence).read_text())
    hw, noise = calibrated_default()
    if args.noise_file:
        noise = config.load_noise_file(args.noise_file)
    if args.shots is not None:
        noise = noise.with_(shots=args.shots)
    _emit(json.dumps(noisy_execute(seq, hw, noise, args.key).to_dict()) + "\n", args.out)
    return 0


def cmd_calibrate(args) -> int:
    from .calibration import calibrate

    _emit(json.dumps(calibrate(), indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reupload", description="Single-qubit re-uploading classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train with the exact simulator")
    _add_config_args(p)
    p.add_argument("--checkpoint", help="write the trained parameters here")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", help="one full experiment row from a config")
    _add_config_args(p)
    p.add_argument("--fine-tune", dest="fine_tune", action="store_true")
    p.add_argument("--baselines", action="store_true")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="accuracy of a checkpoint on the test set")
    _add_config_args(p)
    p.add_argument("--theta", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("fine-tune", help="pairwise scan against the emulator")
    _add_config_args(p)
    p.add_argument("--theta", required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fine_tune)

    p = sub.add_parser("grid", help="decision-boundary grid of a planar model")
    p.add_argument("--theta", required=True)
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--classes", type=int)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("table", help="benchmark table over all problems")
    p.add_argument("--seed", type=int)
    p.add_argument("--problems", help="comma-separated subset")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", help="exact accuracy versus layer count")
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--layer-list", dest="layer_list", default="1,2,3,4")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dataset", help="write a dataset as CSV")
    p.add_argument("--problem", choices=sorted(PROBLEMS))
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("fuse", help="compile one sample into a pulse sequence")
    p.add_argument("--theta", required=True)
    p.add_argument("--x", required=True, help="comma-separated features")
    p.add_argument("--class", dest="cls", type=int, default=0)
    p.add_argument("--classes", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("emulate", help="run a pulse-sequence file on the emulator")
    p.add_argument("--sequence", required=True)
    p.add_argument("--noise-file", dest="noise_file")
    p.add_argument("--shots", type=int)
    p.add_argument("--key", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_emulate)

    p = sub.add_parser("calibrate", help="refit the emulator's systematic over-rotation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingFailure as exc:
        partial = {"error": str(exc), "partial": exc.partial}
        if exc.theta is not None and hasattr(exc.theta, "to_dict"):
            partial["last_valid_theta"] = exc.theta.to_dict()
        print(json.dumps(partial, indent=2, default=str), file=sys.stderr)
        return 2
    except (InvalidArgumentError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
