"""Command line: train a model, export logit files, report accuracies."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .data import DatasetFormatError, read_dataset
from .predict import export_logits
from .train import Hyper, load_checkpoint, report_accuracies, save_checkpoint, train


def cmd_train(args) -> int:
    limits, samples = read_dataset(args.data)
    hyper = Hyper(epochs=args.epochs, batch_size=args.batch_size,
                  learning_rate=args.lr, embed_size=args.embed_size,
                  hidden_size=args.hidden_size, seed=args.seed)
    result = train(samples, limits, hyper)
    save_checkpoint(args.out, result)
    summary = {
        "checkpoint": str(args.out),
        "samples": len(samples),
        "steps": result.steps,
        "best_epoch": result.best_epoch,
        "epochs": [dataclasses.asdict(e) for e in result.history],
    }
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    last = result.history[-1]
    print(json.dumps({"checkpoint": str(args.out), "best_epoch": result.best_epoch,
                      "val_loss": result.history[result.best_epoch - 1].val_loss,
                      "token_accuracy": last.token_accuracy}))
    return 0


def cmd_predict(args) -> int:
    model, limits, steps = load_checkpoint(args.model)
    file_limits, samples = read_dataset(args.data)
    if file_limits != limits:
        raise ValueError(
            f"dataset limits {file_limits} do not match the checkpoint's {limits}")
    bad = [i for i, s in enumerate(samples) if s.length != steps]
    if bad:
        raise ValueError(
            f"samples {bad[:5]} have lengths != {steps}, the checkpoint's step count")
    export_logits(model, samples, limits, args.out)
    print(json.dumps({"written": str(args.out), "num_records": len(samples)}))
    return 0


def cmd_report(args) -> int:
    model, limits, steps = load_checkpoint(args.model)
    _, samples = read_dataset(args.data)
    metrics = report_accuracies(model, samples, limits, k=args.k)
    report = {"samples": len(samples), "steps": steps, "k": args.k, **metrics}
    print(json.dumps(report))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="initnet",
        description="neural initializer for the gradient synthesizer")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    t = sub.add_parser("train", help="train on a dataset file")
    t.add_argument("--data", required=True)
    t.add_argument("--out", required=True, help="checkpoint path")
    t.add_argument("--epochs", type=int, default=50)
    t.add_argument("--batch-size", type=int, default=32, dest="batch_size")
    t.add_argument("--lr", type=float, default=5e-4)
    t.add_argument("--embed-size", type=int, default=64, dest="embed_size")
    t.add_argument("--hidden-size", type=int, default=256, dest="hidden_size")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--report", default=None, help="optional epoch-history file")
    t.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="export per-sample logit files")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    r = sub.add_parser("report", help="accuracy metrics on a labeled dataset")
    r.add_argument("--model", required=True)
    r.add_argument("--data", required=True)
    r.add_argument("--k", type=int, default=5)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetFormatError, ValueError, OSError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
