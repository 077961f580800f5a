"""Desk-scale training behavior, checkpoints, prediction, CLI flows."""

import json

import numpy as np
import pytest
import torch

from initnet.cli import main
from initnet.data import CANONICAL_FUNCTIONS, Limits, Sample
from initnet.predict import export_logits, predict_logits
from initnet.train import Hyper, load_checkpoint, save_checkpoint, train

LIM = Limits()


def synthetic_samples(n, length=2, seed=0):
    """Label-correlated toy data: the program is readable off the input."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n):
        fidx = rng.integers(2, 8, size=length)  # arithmetic functions only
        program = tuple(CANONICAL_FUNCTIONS[i] for i in fidx)
        observed = []
        for _ in range(3):
            marker = [int(10 * i + 5) for i in fidx]  # distinct per function
            out = int(rng.integers(-100, 101))
            observed.append((marker, out))
        samples.append(Sample(observed=observed, assessment=[], program=program,
                              length=length, noise=0.0))
    return samples


def quick_hyper(epochs=3, seed=0):
    return Hyper(epochs=epochs, batch_size=16, embed_size=16, hidden_size=32,
                 seed=seed)


class TestTrain:
    def test_loss_decreases_and_history_complete(self):
        result = train(synthetic_samples(80), LIM, quick_hyper(epochs=4))
        assert len(result.history) == 4
        assert [e.epoch for e in result.history] == [1, 2, 3, 4]
        assert 1 <= result.best_epoch <= 4
        best = result.history[result.best_epoch - 1]
        assert best.train_loss < result.history[0].train_loss or result.best_epoch == 1
        assert result.history[-1].train_loss < result.history[0].train_loss
        for e in result.history:
            assert e.sequence_top_k <= e.token_top_k <= 1.0

    def test_best_epoch_has_lowest_val_loss(self):
        result = train(synthetic_samples(60, seed=2), LIM, quick_hyper(epochs=5))
        vals = [e.val_loss for e in result.history]
        assert result.history[result.best_epoch - 1].val_loss == min(vals)

    def test_deterministic_given_seed(self):
        a = train(synthetic_samples(40, seed=3), LIM, quick_hyper(seed=9))
        b = train(synthetic_samples(40, seed=3), LIM, quick_hyper(seed=9))
        assert [e.train_loss for e in a.history] == [e.train_loss for e in b.history]

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            train([], LIM, quick_hyper())

    def test_mixed_lengths_rejected(self):
        bad = synthetic_samples(4, length=2) + synthetic_samples(4, length=3)
        with pytest.raises(ValueError, match="length"):
            train(bad, LIM, quick_hyper())


class TestCheckpoint:
    def test_round_trip_preserves_predictions(self, tmp_path):
        samples = synthetic_samples(40, seed=5)
        result = train(samples, LIM, quick_hyper())
        path = tmp_path / "model.pt"
        save_checkpoint(path, result)
        model, limits, steps = load_checkpoint(path)
        assert limits == LIM
        assert steps == 2
        want = predict_logits(result.model, samples[0], LIM)
        got = predict_logits(model, samples[0], limits)
        assert np.allclose(want, got, atol=1e-6)

    def test_function_set_guard(self, tmp_path):
        result = train(synthetic_samples(30, seed=6), LIM, quick_hyper(epochs=1))
        path = tmp_path / "model.pt"
        save_checkpoint(path, result)
        payload = torch.load(path, weights_only=True)
        payload["functions"] = list(reversed(CANONICAL_FUNCTIONS))
        torch.save(payload, path)
        with pytest.raises(ValueError, match="function set"):
            load_checkpoint(path)


class TestPredict:
    def test_logits_shape_and_dtype(self):
        samples = synthetic_samples(30, seed=7)
        result = train(samples, LIM, quick_hyper(epochs=1))
        theta = predict_logits(result.model, samples[0], LIM)
        assert theta.shape == (2, 12)
        assert theta.dtype == np.float64
        assert np.isfinite(theta).all()

    def test_export_one_record_per_sample(self, tmp_path):
        samples = synthetic_samples(6, seed=8)
        result = train(samples, LIM, quick_hyper(epochs=1))
        path = tmp_path / "logits.jsonl"
        export_logits(result.model, samples, LIM, path)
        records = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(records) == 6
        assert all(r["T"] == 2 and r["functions"] == CANONICAL_FUNCTIONS
                   for r in records)


def dataset_file(tmp_path, samples, name="data.jsonl"):
    path = tmp_path / name
    manifest = {"kind": "gradsynth-dataset", "min_int": -100, "max_int": 100,
                "max_list_len": 10, "num_samples": len(samples),
                "program_length": samples[0].length if samples else 0,
                "examples_observed": 3, "examples_assessment": 0,
                "noise": 0.0, "seed": 0}

    def tag(v):
        if v is None:
            return {"type": "null"}
        if isinstance(v, int):
            return {"type": "int", "value": v}
        return {"type": "list", "value": v}

    with open(path, "w") as fh:
        fh.write(json.dumps(manifest) + "\n")
        for s in samples:
            fh.write(json.dumps({
                "program": list(s.program), "length": s.length, "noise": s.noise,
                "observed": [[tag(i), tag(o)] for i, o in s.observed],
                "assessment": [],
            }) + "\n")
    return path


class TestCli:
    def test_train_predict_report(self, tmp_path, capsys):
        data = dataset_file(tmp_path, synthetic_samples(30, seed=9))
        model = tmp_path / "model.pt"
        code = main(["train", "--data", str(data), "--out", str(model),
                     "--epochs", "2", "--batch-size", "16", "--embed-size", "16",
                     "--hidden-size", "32", "--report", str(tmp_path / "hist.json")])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["checkpoint"] == str(model)
        history = json.loads((tmp_path / "hist.json").read_text())
        assert len(history["epochs"]) == 2

        logits = tmp_path / "logits.jsonl"
        assert main(["predict", "--model", str(model), "--data", str(data),
                     "--out", str(logits)]) == 0
        assert json.loads(capsys.readouterr().out)["num_records"] == 30

        assert main(["report", "--model", str(model), "--data", str(data)]) == 0
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["sequence_top_5"] <= metrics["token_top_5"] <= 1.0

    def test_predict_rejects_wrong_length(self, tmp_path, capsys):
        data2 = dataset_file(tmp_path, synthetic_samples(20, seed=10))
        data3 = dataset_file(tmp_path, synthetic_samples(4, length=3, seed=11),
                             name="other.jsonl")
        model = tmp_path / "model.pt"
        main(["train", "--data", str(data2), "--out", str(model), "--epochs", "1",
              "--embed-size", "16", "--hidden-size", "32"])
        capsys.readouterr()
        assert main(["predict", "--model", str(model), "--data", str(data3),
                     "--out", str(tmp_path / "l.jsonl")]) == 1
        err = json.loads(capsys.readouterr().err)
        assert "lengths" in err["message"]

    def test_missing_data_diagnostic(self, tmp_path, capsys):
        assert main(["train", "--data", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "m.pt")]) == 1
        assert json.loads(capsys.readouterr().err)["error"]
