"""The twelve list-DSL functions: concrete semantics and fuzzy-state transforms.

head/tail pick the first/last element of a list; the ten arithmetic functions
apply elementwise to list elements.  Any function applied to null or to a bare
integer yields null, and an arithmetic result outside the integer range turns
the whole list null.  On state tensors each function acts as a fixed linear
gather/scatter whose index map is precomputed per Config.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from .state import Config, Value, check_value, list_region_mask


class Function(enum.IntEnum):
    """The DSL functions, in the canonical order used everywhere."""

    HEAD = 0
    TAIL = 1
    PLUS1 = 2
    MINUS1 = 3
    TIMES2 = 4
    TIMES3 = 5
    TIMES4 = 6
    TIMESM1 = 7
    POWER2 = 8
    DIV2 = 9
    DIV3 = 10
    DIV4 = 11

    @property
    def canonical_name(self) -> str:
        return self.name.lower()


FUNCTION_NAMES: tuple[str, ...] = tuple(f.canonical_name for f in Function)

ARITHMETIC: tuple[Function, ...] = tuple(f for f in Function if f >= Function.PLUS1)

Program = tuple[Function, ...]


def function_from_name(name: str) -> Function:
    try:
        return Function[name.upper()]
    except KeyError:
        raise ValueError(f"unknown function name: {name!r}") from None


def program_to_names(program: Program) -> list[str]:
    return [f.canonical_name for f in program]


def program_from_names(names: list[str]) -> Program:
    return tuple(function_from_name(n) for n in names)


def _trunc_div(v: int, q: int) -> int:
    # Integer division truncating toward zero: -3 // 2 is -2, but we want -1.
    return -((-v) // q) if v < 0 else v // q


_SCALAR_OPS = {
    Function.PLUS1: lambda v: v + 1,
    Function.MINUS1: lambda v: v - 1,
    Function.TIMES2: lambda v: 2 * v,
    Function.TIMES3: lambda v: 3 * v,
    Function.TIMES4: lambda v: 4 * v,
    Function.TIMESM1: lambda v: -v,
    Function.POWER2: lambda v: v * v,
    Function.DIV2: lambda v: _trunc_div(v, 2),
    Function.DIV3: lambda v: _trunc_div(v, 3),
    Function.DIV4: lambda v: _trunc_div(v, 4),
}


def apply_concrete(f: Function, v: Value, cfg: Config) -> Value:
    """Run one DSL function on a concrete value; null absorbs every error."""
    check_value(v, cfg)
    if v is None or isinstance(v, int):
        return None
    if f == Function.HEAD:
        return v[0]
    if f == Function.TAIL:
        return v[-1]
    op = _SCALAR_OPS[f]
    out = []
    for x in v:
        y = op(x)
        if not cfg.min_int <= y <= cfg.max_int:
            return None
        out.append(y)
    return out


def run_program(program: Program, v: Value, cfg: Config) -> Value:
    """Compose apply_concrete over a program, left to right."""
    for f in program:
        v = apply_concrete(f, v, cfg)
    return v


class TransformTables:
    """Per-Config index maps driving the linear state transforms.

    index_map[s, k] gives the destination value index of source index k under
    arithmetic function s, or -1 when the result leaves the integer range.
    Rows 0 and 1 (head/tail) are unused.  scatter_groups decomposes each
    non-injective map into collision-free (source, target) index pairs so the
    numpy backend can scatter-add without np.add.at.
    """

    def __init__(self, cfg: Config):
        self.cfg = cfg
        d = cfg.num_values
        n = cfg.num_functions
        if n != len(Function):
            raise ValueError(f"config expects {n} functions, DSL defines {len(Function)}")
        index_map = np.full((n, d), -1, dtype=np.int32)
        for f in ARITHMETIC:
            op = _SCALAR_OPS[f]
            for k in range(d):
                y = op(k + cfg.min_int)
                if cfg.min_int <= y <= cfg.max_int:
                    index_map[f, k] = y - cfg.min_int
        self.index_map = index_map
        self.scatter_groups = {f: _collision_free_groups(index_map[f]) for f in ARITHMETIC}
        self.gather_pairs = {}
        for f in ARITHMETIC:
            src = np.nonzero(index_map[f] >= 0)[0]
            self.gather_pairs[f] = (src, index_map[f, src].astype(np.intp))
        self.valid_region = list_region_mask(cfg)
        self.region_block = self.valid_region[2:].astype(np.float64)[None, :, :, None]
        rows = cfg.max_list_len + 2
        self.tail_rows = np.arange(2, rows)
        self.tail_cols = self.tail_rows - 2


def _collision_free_groups(sigma: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    by_target: dict[int, list[int]] = {}
    for k, t in enumerate(sigma):
        if t >= 0:
            by_target.setdefault(int(t), []).append(k)
    groups = []
    depth = max((len(ks) for ks in by_target.values()), default=0)
    for level in range(depth):
        src = [ks[level] for ks in by_target.values() if len(ks) > level]
        tgt = [t for t, ks in by_target.items() if len(ks) > level]
        order = np.argsort(src)
        groups.append(
            (np.asarray(src, dtype=np.intp)[order], np.asarray(tgt, dtype=np.intp)[order])
        )
    return groups


@lru_cache(maxsize=8)
def _tables_cached(min_int: int, max_int: int, max_list_len: int, n: int) -> TransformTables:
    return TransformTables(
        Config(min_int=min_int, max_int=max_int, max_list_len=max_list_len, num_functions=n)
    )


def tables_for(cfg: Config) -> TransformTables:
    """Shared immutable transform tables for a config."""
    return _tables_cached(cfg.min_int, cfg.max_int, cfg.max_list_len, cfg.num_functions)


def transform_fuzzy(f: Function, s: np.ndarray, cfg: Config, backend=None) -> np.ndarray:
    """Apply one function's linear transform to a state tensor."""
    from . import kernels

    if s.shape != cfg.state_shape:
        raise ValueError(f"expected state shape {cfg.state_shape}, got {s.shape}")
    be = kernels.get_backend(backend)
    src = np.ascontiguousarray(s[None], dtype=np.float64)
    out = np.zeros_like(src)
    be.transform_batch(src, int(f), tables_for(cfg), out)
    return out[0]


def transform_adjoint(f: Function, a: np.ndarray, cfg: Config, backend=None) -> np.ndarray:
    """Apply the transpose of transform_fuzzy's linear map to a cotangent."""
    from . import kernels

    if a.shape != cfg.state_shape:
        raise ValueError(f"expected state shape {cfg.state_shape}, got {a.shape}")
    be = kernels.get_backend(backend)
    src = np.ascontiguousarray(a[None], dtype=np.float64)
    out = np.zeros_like(src)
    be.transform_adjoint_batch(src, int(f), tables_for(cfg), out)
    return out[0]
