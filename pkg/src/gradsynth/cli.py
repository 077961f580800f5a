"""Command-line entry point tying generation, synthesis, evaluation, and
the random-search baseline together.

Every run writes a manifest sidecar (<out>.manifest.json) with the resolved
options, value bounds, seed, and timestamps, so result tables can be
regenerated from artifacts alone.  Errors print a JSON diagnostic on stderr
and exit nonzero.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import gradsynth
from gradsynth.datagen import (
    DatasetFormatError,
    DatasetSpec,
    GenerationError,
    config_from_manifest,
    gen_dataset,
    read_dataset,
    read_manifest,
    write_dataset,
)
from gradsynth.dsl import program_from_names, program_to_names, run_program
from gradsynth.engine import SynthOptions, SynthesisResult, synthesize
from gradsynth.evaluation import eval_synthesis, random_search, score_outputs
from gradsynth.logits_io import LogitsFormatError, read_logits
from gradsynth.state import Config


class CliError(RuntimeError):
    pass


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_manifest(out_path, subcommand: str, args, cfg: Config, started: str, finished: str) -> None:
    options = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "kind": "gradsynth-run",
        "subcommand": subcommand,
        "options": options,
        "config": {"min_int": cfg.min_int, "max_int": cfg.max_int, "max_list_len": cfg.max_list_len},
        "seed": options.get("seed"),
        "started": started,
        "finished": finished,
        "version": gradsynth.__version__,
    }
    with open(str(out_path) + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _result_record(idx: int, entropy: list[int], res: SynthesisResult) -> dict:
    return {
        "index": idx,
        "seed": entropy,
        "program": list(program_to_names(res.program)),
        "final_loss": res.final_loss,
        "consistent": res.consistent,
        "restarts": res.restarts_used,
        "wall_time": res.wall_time,
    }


def _read_results(path) -> list[dict]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CliError(f"{path} line {lineno}: {exc}") from None
    return rows


def _synth_task(task):
    idx, sample, cfg, opts, entropy = task
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    return idx, entropy, synthesize(sample, cfg, opts, rng)


def _baseline_task(task):
    idx, sample, cfg, timeout, entropy = task
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    return idx, entropy, random_search(sample, timeout, rng, cfg)


def _run_tasks(worker, tasks, jobs: int):
    if jobs <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def cmd_gen_data(args) -> int:
    started = _utc_now()
    spec = DatasetSpec(
        num_samples=args.num,
        program_length=args.length,
        examples_observed=args.observed,
        examples_assessment=args.assessment,
        noise_prob=args.noise,
        seed=args.seed,
    )
    cfg = Config()
    samples = gen_dataset(spec, cfg)
    write_dataset(samples, args.out, spec, cfg)
    _write_manifest(args.out, "gen-data", args, cfg, started, _utc_now())
    print(json.dumps({"written": str(args.out), "num_samples": len(samples)}))
    return 0


def _load_init(path, samples, cfg: Config):
    matrices = read_logits(path)
    if len(matrices) == 1:
        matrices = matrices * len(samples)
    elif len(matrices) != len(samples):
        raise CliError(
            f"init file has {len(matrices)} records for {len(samples)} samples; need 1 or {len(samples)}")
    for i, (theta, sample) in enumerate(zip(matrices, samples)):
        if theta.shape != (sample.length, cfg.num_functions):
            raise CliError(
                f"init record for sample {i} has shape {theta.shape}, "
                f"expected ({sample.length}, {cfg.num_functions})")
    return matrices


def cmd_synthesize(args) -> int:
    started = _utc_now()
    samples = read_dataset(args.data)
    cfg = config_from_manifest(read_manifest(args.data))
    init = None if args.init == "random" else _load_init(args.init, samples, cfg)
    tasks = []
    for i, sample in enumerate(samples):
        opts = SynthOptions(
            timeout=args.timeout,
            learning_rate=args.lr,
            momentum=args.momentum,
            restart_iters=args.restart_iters,
            max_restarts=args.max_restarts,
            init_logits=None if init is None else init[i],
            structural_prior=args.structural_prior,
            backend=args.backend,
        )
        tasks.append((i, sample, cfg, opts, [args.seed, i]))
    rows = _run_tasks(_synth_task, tasks, args.jobs)
    with open(args.out, "w") as fh:
        for idx, entropy, res in rows:
            fh.write(json.dumps(_result_record(idx, entropy, res)) + "\n")
    _write_manifest(args.out, "synthesize", args, cfg, started, _utc_now())
    consistent = sum(1 for _, _, res in rows if res.consistent)
    print(json.dumps({"written": str(args.out), "num_samples": len(samples), "consistent": consistent}))
    return 0


def cmd_baseline(args) -> int:
    started = _utc_now()
    samples = read_dataset(args.data)
    cfg = config_from_manifest(read_manifest(args.data))
    tasks = [(i, sample, cfg, args.timeout, [args.seed, i]) for i, sample in enumerate(samples)]
    rows = _run_tasks(_baseline_task, tasks, args.jobs)
    with open(args.out, "w") as fh:
        for idx, entropy, res in rows:
            fh.write(json.dumps(_result_record(idx, entropy, res)) + "\n")
    _write_manifest(args.out, "baseline", args, cfg, started, _utc_now())
    consistent = sum(1 for _, _, res in rows if res.consistent)
    print(json.dumps({"written": str(args.out), "num_samples": len(samples), "consistent": consistent}))
    return 0


def cmd_evaluate(args) -> int:
    started = _utc_now()
    samples = read_dataset(args.data)
    manifest = read_manifest(args.data)
    cfg = config_from_manifest(manifest)
    rows = _read_results(args.results)
    if len(rows) != len(samples):
        raise CliError(f"{len(rows)} results for {len(samples)} samples")
    programs = [program_from_names(row["program"]) for row in rows]

    if args.metric == "synthesis":
        results = [SynthesisResult(p, row.get("final_loss"), bool(row.get("consistent")), 0, 0.0)
                   for p, row in zip(programs, rows)]
        value = eval_synthesis(results, samples, cfg)
    else:
        if not any(sample.assessment for sample in samples):
            raise CliError("token-score needs assessment examples; dataset has none")
        scores = []
        for program, sample in zip(programs, samples):
            predicted = [run_program(program, inp, cfg) for inp, _ in sample.assessment]
            truths = [out for _, out in sample.assessment]
            scores.append(score_outputs(predicted, truths).value)
        value = sum(scores) / len(scores)

    report = {
        "metric": args.metric,
        "program_length": manifest.get("program_length"),
        "noise": manifest.get("noise"),
        "num_samples": len(samples),
        "value": value,
        "total_wall_time": sum(row.get("wall_time") or 0.0 for row in rows),
    }
    print(json.dumps(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(report) + "\n")
        _write_manifest(args.out, "evaluate", args, cfg, started, _utc_now())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradsynth",
                                     description="Gradient-based program synthesis toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("gen-data", help="generate a random dataset")
    g.add_argument("--num", type=int, required=True, help="number of samples")
    g.add_argument("--length", type=int, required=True, help="program length")
    g.add_argument("--observed", type=int, default=5, help="observed examples per sample")
    g.add_argument("--assessment", type=int, default=0, help="assessment examples per sample")
    g.add_argument("--noise", type=float, default=0.0, help="per-token replacement probability")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_data)

    s = sub.add_parser("synthesize", help="gradient-descent synthesis over a dataset")
    s.add_argument("--data", required=True)
    s.add_argument("--timeout", type=float, default=5.0, help="seconds per sample")
    s.add_argument("--lr", type=float, default=0.2)
    s.add_argument("--momentum", type=float, default=0.0)
    s.add_argument("--init", default="random", help="'random' or a logits file")
    s.add_argument("--restart-iters", type=int, default=200, dest="restart_iters")
    s.add_argument("--max-restarts", type=int, default=None, dest="max_restarts",
                   help="cap on restarts (default: restart until the timeout)")
    s.add_argument("--structural-prior", action="store_true",
                   help="suppress head/tail before the final step")
    s.add_argument("--backend", default=None, help="kernel backend (c or python)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_synthesize)

    e = sub.add_parser("evaluate", help="score a results file against its dataset")
    e.add_argument("--data", required=True)
    e.add_argument("--results", required=True)
    e.add_argument("--metric", choices=["synthesis", "token-score"], required=True)
    e.add_argument("--out", default=None, help="optional report file")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("baseline", help="random-search baseline over a dataset")
    b.add_argument("--data", required=True)
    b.add_argument("--timeout", type=float, default=5.0, help="seconds per sample")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_baseline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GenerationError, DatasetFormatError, LogitsFormatError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
