"""Reader for the synthesizer's dataset files and writer for its logit files.

Both formats are line-delimited JSON.  A dataset starts with a manifest
object (kind "gradsynth-dataset", integer range, list length cap, sample
counts) followed by one sample object per line; values are tagged
{"type": "null"|"int"|"list", "value": ...}.  A logit file holds records
{"T", "n", "functions", "logits"} with functions in the canonical order
below.  This package deliberately parses the files itself rather than
importing the synthesizer: the files are the interface.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

CANONICAL_FUNCTIONS = [
    "head", "tail", "plus1", "minus1", "times2", "times3",
    "times4", "timesm1", "power2", "div2", "div3", "div4",
]

Value = None | int | list[int]


class DatasetFormatError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Limits:
    """Value-range metadata a dataset was generated under."""

    min_int: int = -100
    max_int: int = 100
    max_list_len: int = 10

    @property
    def num_values(self) -> int:
        return self.max_int - self.min_int + 1

    @property
    def pad_token(self) -> int:
        return self.num_values

    @property
    def tokens_per_value(self) -> int:
        return self.max_list_len + 2


@dataclasses.dataclass(frozen=True)
class Sample:
    observed: list[tuple[Value, Value]]
    assessment: list[tuple[Value, Value]]
    program: tuple[str, ...]
    length: int
    noise: float


def _value_from_json(obj, lineno: int) -> Value:
    try:
        kind = obj["type"]
        if kind == "null":
            return None
        if kind == "int":
            return int(obj["value"])
        if kind == "list":
            return [int(x) for x in obj["value"]]
    except (KeyError, TypeError, ValueError):
        pass
    raise DatasetFormatError(f"line {lineno}: bad value {obj!r}")


def _pairs_from_json(obj, lineno: int) -> list[tuple[Value, Value]]:
    return [(_value_from_json(i, lineno), _value_from_json(o, lineno))
            for i, o in obj]


def read_dataset(path) -> tuple[Limits, list[Sample]]:
    """Parse a dataset file into its limits and samples."""
    with open(path) as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise DatasetFormatError(f"{path}: empty file")
    try:
        manifest = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"line 1: {exc}") from None
    if manifest.get("kind") != "gradsynth-dataset":
        raise DatasetFormatError(f"{path}: not a dataset file")
    limits = Limits(min_int=int(manifest["min_int"]),
                    max_int=int(manifest["max_int"]),
                    max_list_len=int(manifest["max_list_len"]))
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from None
        try:
            program = tuple(obj["program"])
            sample = Sample(
                observed=_pairs_from_json(obj["observed"], lineno),
                assessment=_pairs_from_json(obj.get("assessment", []), lineno),
                program=program,
                length=int(obj["length"]),
                noise=float(obj.get("noise", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from None
        unknown = [f for f in program if f not in CANONICAL_FUNCTIONS]
        if unknown:
            raise DatasetFormatError(f"line {lineno}: unknown functions {unknown}")
        if len(program) != sample.length:
            raise DatasetFormatError(
                f"line {lineno}: program length {len(program)} != {sample.length}")
        samples.append(sample)
    if len(samples) != int(manifest["num_samples"]):
        raise DatasetFormatError(
            f"{path}: manifest promises {manifest['num_samples']} samples, "
            f"found {len(samples)}")
    return limits, samples


def write_logits_file(matrices: list[np.ndarray], path) -> None:
    """Write one logit record per matrix in the shared interchange format."""
    with open(path, "w") as fh:
        for theta in matrices:
            theta = np.asarray(theta, dtype=float)
            if theta.ndim != 2 or theta.shape[1] != len(CANONICAL_FUNCTIONS):
                raise ValueError(f"logit matrix has shape {theta.shape}")
            if not np.isfinite(theta).all():
                raise ValueError("logit matrix has non-finite entries")
            record = {
                "T": theta.shape[0],
                "n": theta.shape[1],
                "functions": CANONICAL_FUNCTIONS,
                "logits": theta.tolist(),
            }
            fh.write(json.dumps(record) + "\n")
