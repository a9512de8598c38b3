import json

import pytest

from reupload.cli import main
from reupload.errors import TrainingFailure

FAST = ["--n-train", "40", "--n-test", "60", "--layers", "1", "--max-evaluations", "200", "--restarts", "1"]


def test_train_then_evaluate_and_grid(tmp_path, capsys):
    ck = tmp_path / "theta.json"
    assert main(["train", "--problem", "circle", *FAST, "--checkpoint", str(ck), "--out", str(tmp_path / "r.json")]) == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert 0 <= rep["test_accuracy"] <= 1
    assert main(["evaluate", "--problem", "circle", *FAST, "--theta", str(ck)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["accuracy"] == [rep["test_accuracy"]]
    assert main(["grid", "--theta", str(ck), "--resolution", "5", "--out", str(tmp_path / "g.csv")]) == 0
    assert len((tmp_path / "g.csv").read_text().splitlines()) == 26


def test_fine_tune_verb(tmp_path, capsys):
    ck = tmp_path / "theta.json"
    main(["train", "--problem", "circle", *FAST, "--checkpoint", str(ck), "--out", str(tmp_path / "r.json")])
    code = main(["fine-tune", "--problem", "circle", *FAST, "--theta", str(ck), "--trials", "2",
                 "--set", "scan.passes=1", "--set", "scan.max_pairs=1", "--set", "scan.grid=3"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["acc_q"]) == 2 and out["accuracy_trace"][-1] >= out["accuracy_trace"][0]


def test_run_from_config_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("problem = squares\nlayers = 1\nn_train = 40\nn_test = 50\noptimizer.max_evaluations = 100\n"
                   "optimizer.restarts = 1\n")
    assert main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "out")]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["problem"] == "squares" and row["executor"] == "exact"
    assert (tmp_path / "out" / "squares-L1-s0-report.json").exists()


def test_dataset_fuse_and_emulate(tmp_path, capsys):
    assert main(["dataset", "--problem", "tricrown", "--n", "5", "--seed", "2"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 6
    theta = tmp_path / "t.json"
    theta.write_text(json.dumps({"ansatz": "A", "dim": 2, "layers": [[0.5, 0.1, 0.2, 0.3]]}))
    seq = tmp_path / "s.txt"
    assert main(["fuse", "--theta", str(theta), "--x", "0.1,0.2", "--class", "1", "--out", str(seq)]) == 0
    assert len(seq.read_text().splitlines()) == 2
    assert main(["emulate", "--sequence", str(seq), "--shots", "10", "--key", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["shots_used"] == 10


@pytest.mark.parametrize("argv", [
    ["train", "--set", "layers=zero"],
    ["train", "--set", "bogus"],
    ["train", "--set", "noise.shots=5"],
    ["evaluate", "--theta", "/nonexistent/theta.json"],
])
def test_config_errors_exit_one(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_grid_of_non_planar_model_exits_one(tmp_path):
    theta = tmp_path / "t.json"
    theta.write_text(json.dumps({"ansatz": "A", "dim": 3, "layers": [[0, 0, 0, 0, 0]]}))
    assert main(["grid", "--theta", str(theta)]) == 1


def test_training_failure_exits_two(monkeypatch, capsys):
    import reupload.training as training

    def fail(*a, **k):
        raise TrainingFailure("non-finite loss at evaluation 3")

    monkeypatch.setattr(training, "train_simulated", fail)
    assert main(["train", *FAST]) == 2
    assert "non-finite" in capsys.readouterr().err


def test_sweep_verb(capsys):
    import reupload.bench as bench

    assert main(["sweep", "--problem", "circle", "--layer-list", "1", "--seeds", "1"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert rows[0]["layers"] == 1 and len(rows[0]["acc_star"]) == 1
    assert bench.FINE_TUNED == ("circle", "hypersphere")
