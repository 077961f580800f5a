"""Probabilistic tensor encoding of DSL values.

A value is either null, a bounded integer, or a bounded-length list of bounded
integers.  Each value maps to a (max_list_len+2, max_list_len, num_values)
probability tensor: row 0 holds the null indicator at (0, 0, 0), row 1 holds a
one-hot integer at (1, 0, k), and row i >= 2 holds a list of length i-1 with
one-hot columns j = 0..i-2.  Convex combinations of such "sharp" tensors
represent distributions over values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Null is represented by None, integers by int, lists by list[int].
Value = int | list[int] | None


@dataclass(frozen=True)
class Config:
    """Problem-size parameters shared by every module."""

    min_int: int = -100
    max_int: int = 100
    max_list_len: int = 10
    prog_len: int = 5
    examples_per_sample: int = 5
    num_functions: int = 12

    def __post_init__(self):
        if self.max_int <= self.min_int:
            raise ValueError("max_int must exceed min_int")
        if self.max_list_len < 1:
            raise ValueError("max_list_len must be positive")

    @property
    def num_values(self) -> int:
        return self.max_int - self.min_int + 1

    @property
    def state_shape(self) -> tuple[int, int, int]:
        return (self.max_list_len + 2, self.max_list_len, self.num_values)

    def batch_shape(self, num_examples: int) -> tuple[int, int, int, int]:
        return (num_examples,) + self.state_shape


def check_value(v: Value, cfg: Config) -> None:
    """Raise ValueError unless v is null, an in-range int, or a valid list."""
    if v is None:
        return
    if isinstance(v, bool):
        raise ValueError(f"not a DSL value: {v!r}")
    if isinstance(v, int):
        if not cfg.min_int <= v <= cfg.max_int:
            raise ValueError(f"integer {v} outside [{cfg.min_int}, {cfg.max_int}]")
        return
    if isinstance(v, list):
        if not 1 <= len(v) <= cfg.max_list_len:
            raise ValueError(f"list length {len(v)} outside [1, {cfg.max_list_len}]")
        for x in v:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                raise ValueError(f"list element {x!r} is not an integer")
            if not cfg.min_int <= x <= cfg.max_int:
                raise ValueError(
                    f"list element {x} outside [{cfg.min_int}, {cfg.max_int}]"
                )
        return
    raise ValueError(f"not a DSL value: {v!r}")


def encode(v: Value, cfg: Config) -> np.ndarray:
    """Encode a value as its sharp state tensor."""
    check_value(v, cfg)
    out = np.zeros(cfg.state_shape)
    if v is None:
        out[0, 0, 0] = 1.0
    elif isinstance(v, int):
        out[1, 0, v - cfg.min_int] = 1.0
    else:
        row = len(v) + 1
        for j, x in enumerate(v):
            out[row, j, x - cfg.min_int] = 1.0
    return out


def encode_batch(values: list[Value], cfg: Config) -> np.ndarray:
    """Stack per-example encodings into an (m, rows, cols, vals) tensor."""
    return np.stack([encode(v, cfg) for v in values])


def decode_sharp(s: np.ndarray, cfg: Config) -> Value:
    """Invert encode() on a sharp state; raises on any non-sharp column."""
    _check_shape(s, cfg)
    kind = _sharp_kind(s)
    if kind is None:
        raise ValueError(_first_violation_message(s, cfg))
    if kind == "null":
        return None
    if kind == "int":
        return int(np.argmax(s[1, 0])) + cfg.min_int
    row = kind
    length = row - 1
    return [int(np.argmax(s[row, j])) + cfg.min_int for j in range(length)]


def is_sharp(s: np.ndarray) -> bool:
    """True iff the tensor equals encode(v) for some value v."""
    return _sharp_kind(s) is not None


@dataclass
class ValidationReport:
    """Outcome of the structural and mass checks on one state tensor."""

    structural_violations: list[tuple[int, int, int]] = field(default_factory=list)
    negative_entries: list[tuple[int, int, int]] = field(default_factory=list)
    max_column_mass: float = 0.0
    mass_tolerance: float = 1e-9

    @property
    def mass_ok(self) -> bool:
        return self.max_column_mass <= 1.0 + self.mass_tolerance

    @property
    def ok(self) -> bool:
        return (
            not self.structural_violations
            and not self.negative_entries
            and self.mass_ok
        )


MASS_TOLERANCE = 1e-9

_MAX_REPORTED = 16


def validate(s: np.ndarray, cfg: Config, tol: float = MASS_TOLERANCE) -> ValidationReport:
    """Check structural zeros, nonnegativity, and the column-mass bound."""
    _check_shape(s, cfg)
    report = ValidationReport(mass_tolerance=tol)
    pad = ~structure_mask(cfg)
    bad = np.argwhere((s != 0.0) & pad)
    report.structural_violations = [tuple(map(int, idx)) for idx in bad[:_MAX_REPORTED]]
    neg = np.argwhere(s < 0.0)
    report.negative_entries = [tuple(map(int, idx)) for idx in neg[:_MAX_REPORTED]]
    report.max_column_mass = max_column_mass(s)
    return report


def max_column_mass(s: np.ndarray) -> float:
    """Largest total mass over any one column selection per list row.

    Computes null + integer mass plus, for each list row i >= 2, the heaviest
    of its columns j <= i-2; the encoding invariant bounds this by 1.
    """
    rows = s.shape[0]
    total = float(s[0, 0, 0]) + float(s[1, 0].sum())
    col_mass = s.sum(axis=2)
    for i in range(2, rows):
        total += float(col_mass[i, : i - 1].max())
    return total


def structure_mask(cfg: Config) -> np.ndarray:
    """Boolean mask of positions a valid state may occupy."""
    rows, cols, vals = cfg.state_shape
    mask = np.zeros((rows, cols, vals), dtype=bool)
    mask[0, 0, 0] = True
    mask[1, 0, :] = True
    for i in range(2, rows):
        mask[i, : i - 1, :] = True
    return mask


def list_region_mask(cfg: Config) -> np.ndarray:
    """Boolean (rows, cols) mask of the occupiable list columns (rows >= 2)."""
    rows, cols, _ = cfg.state_shape
    mask = np.zeros((rows, cols), dtype=bool)
    for i in range(2, rows):
        mask[i, : i - 1] = True
    return mask


def _check_shape(s: np.ndarray, cfg: Config) -> None:
    if s.shape != cfg.state_shape:
        raise ValueError(f"expected state shape {cfg.state_shape}, got {s.shape}")


def _sharp_kind(s: np.ndarray) -> int | str | None:
    """Classify a sharp tensor: 'null', 'int', a list row index, or None."""
    if not np.isin(s, (0.0, 1.0)).all():
        return None
    ones = np.argwhere(s == 1.0)
    if len(ones) == 0:
        return None
    first = tuple(ones[0])
    if first[0] == 0:
        return "null" if len(ones) == 1 and first == (0, 0, 0) else None
    if first[0] == 1:
        return "int" if len(ones) == 1 and first[1] == 0 else None
    row = int(first[0])
    length = row - 1
    if len(ones) != length:
        return None
    for rank, (i, j, _k) in enumerate(ones):
        if i != row or j != rank:
            return None
    return row


def _first_violation_message(s: np.ndarray, cfg: Config) -> str:
    rows = s.shape[0]
    if not np.isin(s, (0.0, 1.0)).all():
        i, j, k = map(int, np.argwhere(~np.isin(s, (0.0, 1.0)))[0])
        return f"non-sharp state: fractional entry {s[i, j, k]} in column ({i}, {j})"
    counts = (s == 1.0).sum(axis=2)
    occupied_rows = [i for i in range(rows) if counts[i].any()]
    if not occupied_rows:
        return "non-sharp state: no nonzero entries"
    if len(occupied_rows) > 1:
        i = occupied_rows[1]
        j = int(np.argwhere(counts[i])[0])
        return f"non-sharp state: mass in multiple rows, extra column ({i}, {j})"
    i = occupied_rows[0]
    expect = 1 if i <= 1 else i - 1
    for j in range(s.shape[1]):
        want = 1 if j < expect else 0
        if counts[i, j] != want:
            return f"non-sharp state: column ({i}, {j}) has {int(counts[i, j])} ones"
    return f"non-sharp state: row {i} malformed"
