"""Output scoring, synthesis-accuracy measurement, and the random-search baseline."""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from gradsynth.dsl import Function, run_program
from gradsynth.engine import SynthesisResult, program_consistent
from gradsynth.state import Config, Value


@dataclasses.dataclass(frozen=True)
class Score:
    numerator: int
    denominator: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator if self.denominator else 0.0


def _token_len(v: Value) -> int:
    if v is None:
        return 0
    if isinstance(v, int):
        return 1
    return len(v)


def score_outputs(predicted: list[Value], truth: list[Value]) -> Score:
    """Partial credit per example: 1 for the right type (int vs list), plus 1
    per position with the right token.  Each example contributes
    1 + max(len(predicted), len(truth)) to the denominator; Null counts as
    length 0 and earns nothing.
    """
    if len(predicted) != len(truth):
        raise ValueError(f"{len(predicted)} predictions for {len(truth)} truths")
    numerator = 0
    denominator = 0
    for pred, true in zip(predicted, truth):
        if true is None:
            raise ValueError("truth values must not be Null")
        denominator += 1 + max(_token_len(pred), _token_len(true))
        if pred is None:
            continue
        pred_int = isinstance(pred, int)
        if pred_int != isinstance(true, int):
            continue
        numerator += 1
        if pred_int:
            numerator += int(pred == true)
        else:
            numerator += sum(1 for a, b in zip(pred, true) if a == b)
    return Score(numerator, denominator)


def eval_synthesis(results: list[SynthesisResult], samples, cfg: Config | None = None) -> float:
    """Fraction of samples whose returned program reproduces every observed
    pair exactly, re-checked with the concrete interpreter.  Empty input
    scores 0.0.
    """
    cfg = Config() if cfg is None else cfg
    if len(results) != len(samples):
        raise ValueError(f"{len(results)} results for {len(samples)} samples")
    if not samples:
        return 0.0
    hits = sum(1 for res, sample in zip(results, samples)
               if program_consistent(res.program, sample.observed, cfg))
    return hits / len(samples)


def random_search(sample, timeout: float, rng: np.random.Generator,
                  cfg: Config | None = None) -> SynthesisResult:
    """Uniform draws over the full program space until one matches the
    observed pairs or time runs out; otherwise returns the best-scoring
    draw.  final_loss is None (no loss is optimized here).
    """
    cfg = Config() if cfg is None else cfg
    n = cfg.num_functions
    truths = [out for _, out in sample.observed]
    start = time.perf_counter()
    deadline = start + timeout
    best_program = None
    best_score = -1.0
    draws = 0
    while True:
        program = tuple(Function(int(s)) for s in rng.integers(n, size=sample.length))
        draws += 1
        outputs = [run_program(program, inp, cfg) for inp, _ in sample.observed]
        if outputs == truths:
            return SynthesisResult(program, None, True, draws, time.perf_counter() - start)
        score = score_outputs(outputs, truths).value
        if score > best_score:
            best_score = score
            best_program = program
        if time.perf_counter() >= deadline:
            return SynthesisResult(best_program, None, False, draws, time.perf_counter() - start)
