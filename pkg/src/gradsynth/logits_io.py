"""Logit initialization files, the interface between the neural initializer
and the synthesizer.

Line-delimited JSON, one record per sample (or a single record applied to
every sample): {"T": int, "n": int, "functions": [names...], "logits": [[...], ...]}.
"""

from __future__ import annotations

import json

import numpy as np

from gradsynth.dsl import FUNCTION_NAMES


class LogitsFormatError(ValueError):
    pass


def write_logits(matrices: list[np.ndarray], path) -> None:
    with open(path, "w") as fh:
        for theta in matrices:
            theta = np.asarray(theta, dtype=float)
            record = {
                "T": theta.shape[0],
                "n": theta.shape[1],
                "functions": list(FUNCTION_NAMES),
                "logits": theta.tolist(),
            }
            fh.write(json.dumps(record) + "\n")


def read_logits(path) -> list[np.ndarray]:
    """Parse and validate a logits file; raises LogitsFormatError with the
    offending line number.
    """
    matrices = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogitsFormatError(f"line {lineno}: {exc}") from None
            matrices.append(_parse_record(record, lineno))
    if not matrices:
        raise LogitsFormatError(f"{path}: no logit records")
    return matrices


def _parse_record(record, lineno: int) -> np.ndarray:
    if not isinstance(record, dict):
        raise LogitsFormatError(f"line {lineno}: expected an object")
    try:
        T = int(record["T"])
        n = int(record["n"])
        functions = record["functions"]
        logits = np.asarray(record["logits"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise LogitsFormatError(f"line {lineno}: {exc}") from None
    if T < 1:
        raise LogitsFormatError(f"line {lineno}: T must be at least 1, got {T}")
    if list(functions) != list(FUNCTION_NAMES):
        raise LogitsFormatError(f"line {lineno}: functions must be the canonical order {list(FUNCTION_NAMES)}")
    if n != len(FUNCTION_NAMES):
        raise LogitsFormatError(f"line {lineno}: n={n} does not match {len(FUNCTION_NAMES)} functions")
    if logits.shape != (T, n):
        raise LogitsFormatError(f"line {lineno}: logits shape {logits.shape} does not match ({T}, {n})")
    if not np.all(np.isfinite(logits)):
        raise LogitsFormatError(f"line {lineno}: logits must be finite")
    return logits
