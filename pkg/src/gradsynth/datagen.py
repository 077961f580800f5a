"""Random program/sample generation, noise injection, and dataset files.

Dataset files are line-delimited JSON: one manifest header line recording
the value bounds and generation settings, then one record per sample.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from gradsynth.dsl import ARITHMETIC, Function, Program, program_from_names, program_to_names, run_program
from gradsynth.state import Config, Value

# Total input draws per sample before generation fails.
GEN_ATTEMPT_BUDGET = 10_000
# Input draws granted to one program before the program itself is redrawn.
ATTEMPTS_PER_PROGRAM = 200

MANIFEST_KIND = "gradsynth-dataset"


class GenerationError(RuntimeError):
    pass


class DatasetFormatError(ValueError):
    pass


@dataclasses.dataclass
class Sample:
    observed: list[tuple[Value, Value]]
    assessment: list[tuple[Value, Value]]
    program: Program
    length: int
    noise: float


@dataclasses.dataclass(frozen=True)
class DatasetSpec:
    num_samples: int
    program_length: int
    examples_observed: int = 5
    examples_assessment: int = 0
    noise_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_samples < 0:
            raise ValueError("num_samples must be non-negative")
        if self.program_length < 1:
            raise ValueError("program_length must be at least 1")
        if not 0.0 <= self.noise_prob <= 1.0:
            raise ValueError("noise_prob must lie in [0, 1]")
        if self.examples_observed < 1:
            raise ValueError("need at least one observed example")
        if self.examples_assessment < 0:
            raise ValueError("examples_assessment must be non-negative")


def gen_program(length: int, rng: np.random.Generator) -> Program:
    """Uniform random program; head/tail only ever in the final slot.

    Anywhere earlier they force Null outputs for every input, since all
    later functions map their Int result to Null.
    """
    if length < 1:
        raise ValueError("program length must be at least 1")
    arith = list(ARITHMETIC)
    ops = [arith[int(rng.integers(len(arith)))] for _ in range(length - 1)]
    ops.append(Function(int(rng.integers(len(Function)))))
    return tuple(ops)


def draw_input(rng: np.random.Generator, cfg: Config) -> list[int]:
    length = int(rng.integers(1, cfg.max_list_len + 1))
    return [int(x) for x in rng.integers(cfg.min_int, cfg.max_int + 1, size=length)]


def pairs_for_program(program: Program, count: int, rng: np.random.Generator, cfg: Config,
                      budget: int) -> tuple[list[tuple[Value, Value]] | None, int]:
    """Draw inputs until count non-Null executions are collected.

    Returns (pairs, attempts_used); pairs is None when the budget ran out.
    """
    pairs: list[tuple[Value, Value]] = []
    for attempt in range(1, budget + 1):
        inp = draw_input(rng, cfg)
        out = run_program(program, inp, cfg)
        if out is None:
            continue
        pairs.append((inp, out))
        if len(pairs) == count:
            return pairs, attempt
    return None, budget


def gen_sample(spec: DatasetSpec, rng: np.random.Generator, cfg: Config | None = None) -> Sample:
    """Draw a program and non-Null I/O pairs for it, then noise observed outputs.

    Inputs producing Null are rejected; a program that keeps producing
    Null within its per-program allowance is itself redrawn (discarding
    its collected examples).
    """
    cfg = Config() if cfg is None else cfg
    wanted = spec.examples_observed + spec.examples_assessment
    program = gen_program(spec.program_length, rng)
    spent = 0
    while True:
        allowance = min(ATTEMPTS_PER_PROGRAM, GEN_ATTEMPT_BUDGET - spent)
        pairs, used = pairs_for_program(program, wanted, rng, cfg, allowance)
        spent += used
        if pairs is not None:
            observed = [(inp, inject_noise(out, spec.noise_prob, rng, cfg))
                        for inp, out in pairs[:spec.examples_observed]]
            assessment = pairs[spec.examples_observed:]
            return Sample(observed, assessment, program, spec.program_length, spec.noise_prob)
        if spent >= GEN_ATTEMPT_BUDGET:
            raise GenerationError(
                f"no non-Null inputs for program {' '.join(program_to_names(program))} "
                f"after {spent} attempts")
        program = gen_program(spec.program_length, rng)


def gen_dataset(spec: DatasetSpec, cfg: Config | None = None) -> list[Sample]:
    """Generate spec.num_samples samples, each from its own derived seed."""
    return [gen_sample(spec, np.random.default_rng(np.random.SeedSequence([spec.seed, i])), cfg)
            for i in range(spec.num_samples)]


def inject_noise(v: Value, p: float, rng: np.random.Generator, cfg: Config | None = None) -> Value:
    """Replace each value token with probability p by a uniform random integer.

    The type token and list length never change.
    """
    cfg = Config() if cfg is None else cfg
    if v is None:
        raise ValueError("cannot inject noise into a Null value")
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise probability must lie in [0, 1]")

    def tok(x: int) -> int:
        if rng.random() < p:
            return int(rng.integers(cfg.min_int, cfg.max_int + 1))
        return x

    if isinstance(v, int):
        return tok(v)
    return [tok(x) for x in v]


def _value_to_json(v: Value):
    if v is None:
        return {"type": "null"}
    if isinstance(v, int):
        return {"type": "int", "value": v}
    return {"type": "list", "value": list(v)}


def _value_from_json(obj) -> Value:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError(f"expected a tagged value object, got {obj!r}")
    tag = obj["type"]
    if tag == "null":
        return None
    if tag == "int":
        return int(obj["value"])
    if tag == "list":
        return [int(x) for x in obj["value"]]
    raise ValueError(f"unknown value type tag {tag!r}")


def _pairs_to_json(pairs):
    return [[_value_to_json(i), _value_to_json(o)] for i, o in pairs]


def _pairs_from_json(obj):
    return [(_value_from_json(i), _value_from_json(o)) for i, o in obj]


def sample_to_json(sample: Sample) -> dict:
    return {
        "program": list(program_to_names(sample.program)),
        "length": sample.length,
        "noise": sample.noise,
        "observed": _pairs_to_json(sample.observed),
        "assessment": _pairs_to_json(sample.assessment),
    }


def sample_from_json(obj: dict) -> Sample:
    return Sample(
        observed=_pairs_from_json(obj["observed"]),
        assessment=_pairs_from_json(obj["assessment"]),
        program=program_from_names(obj["program"]),
        length=int(obj["length"]),
        noise=float(obj["noise"]),
    )


def make_manifest(spec: DatasetSpec | None, cfg: Config, num_samples: int) -> dict:
    manifest = {
        "kind": MANIFEST_KIND,
        "min_int": cfg.min_int,
        "max_int": cfg.max_int,
        "max_list_len": cfg.max_list_len,
        "num_samples": num_samples,
    }
    if spec is not None:
        manifest.update(
            program_length=spec.program_length,
            examples_observed=spec.examples_observed,
            examples_assessment=spec.examples_assessment,
            noise=spec.noise_prob,
            seed=spec.seed,
        )
    return manifest


def config_from_manifest(manifest: dict) -> Config:
    return Config(min_int=int(manifest["min_int"]),
                  max_int=int(manifest["max_int"]),
                  max_list_len=int(manifest["max_list_len"]))


def write_dataset(samples: list[Sample], path, spec: DatasetSpec | None = None,
                  cfg: Config | None = None) -> None:
    cfg = Config() if cfg is None else cfg
    with open(path, "w") as fh:
        fh.write(json.dumps(make_manifest(spec, cfg, len(samples))) + "\n")
        for sample in samples:
            fh.write(json.dumps(sample_to_json(sample)) + "\n")


def read_manifest(path) -> dict:
    with open(path) as fh:
        line = fh.readline()
    if not line.strip():
        raise DatasetFormatError(f"{path}: empty file has no manifest")
    try:
        manifest = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"line 1: {exc}") from None
    if not isinstance(manifest, dict) or manifest.get("kind") != MANIFEST_KIND:
        raise DatasetFormatError("line 1: not a dataset manifest")
    return manifest


def read_dataset(path) -> list[Sample]:
    """Parse a dataset file; malformed lines raise with their line number."""
    samples = []
    with open(path) as fh:
        first = fh.readline()
        if not first.strip():
            return []
        try:
            manifest = json.loads(first)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"line 1: {exc}") from None
        if not isinstance(manifest, dict) or manifest.get("kind") != MANIFEST_KIND:
            raise DatasetFormatError("line 1: not a dataset manifest")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                samples.append(sample_from_json(json.loads(line)))
            except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
                raise DatasetFormatError(f"line {lineno}: {exc}") from None
    return samples
