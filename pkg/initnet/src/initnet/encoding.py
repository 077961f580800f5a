"""Token sequences the network consumes.

One value becomes max_list_len + 2 integer tokens: two leading type flags
(1,0 integer / 0,1 list), then value indices (value − min_int, one per
element, a single index for an integer), padded to length with the
sentinel index num_values.  An I/O pair is the input sequence followed by
the output sequence.
"""

from __future__ import annotations

import numpy as np

from .data import CANONICAL_FUNCTIONS, Limits, Sample, Value


def encode_value(v: Value, limits: Limits) -> list[int]:
    if v is None:
        raise ValueError("cannot encode a null value")
    width = limits.tokens_per_value
    pad = limits.pad_token
    if isinstance(v, bool) or not isinstance(v, (int, list)):
        raise ValueError(f"not an encodable value: {v!r}")
    if isinstance(v, int):
        if not limits.min_int <= v <= limits.max_int:
            raise ValueError(f"integer {v} outside [{limits.min_int}, {limits.max_int}]")
        tokens = [1, 0, v - limits.min_int]
    else:
        if not 1 <= len(v) <= limits.max_list_len:
            raise ValueError(f"list length {len(v)} outside 1..{limits.max_list_len}")
        for x in v:
            if not limits.min_int <= x <= limits.max_int:
                raise ValueError(
                    f"element {x} outside [{limits.min_int}, {limits.max_int}]")
        tokens = [0, 1] + [x - limits.min_int for x in v]
    return tokens + [pad] * (width - len(tokens))


def encode_pair(inp: Value, out: Value, limits: Limits) -> list[int]:
    return encode_value(inp, limits) + encode_value(out, limits)


def encode_sample(sample: Sample, limits: Limits) -> np.ndarray:
    """All observed pairs as one (m, 2·(max_list_len+2)) token array."""
    if not sample.observed:
        raise ValueError("sample has no observed examples")
    return np.array([encode_pair(i, o, limits) for i, o in sample.observed],
                    dtype=np.int64)


def program_indices(program) -> list[int]:
    return [CANONICAL_FUNCTIONS.index(f) for f in program]
