"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the transform tables and kernel code:
they work from the concrete interpreter (or plain per-slot arithmetic) so
that agreement with the engine is evidence, not circularity.
"""

from __future__ import annotations

import itertools

import numpy as np

from gradsynth.dsl import Function, apply_concrete, run_program
from gradsynth.state import Config, Value, encode

CFG = Config()


def random_value(rng: np.random.Generator, cfg: Config,
                 kinds=("null", "int", "list")) -> Value:
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "null":
        return None
    if kind == "int":
        return int(rng.integers(cfg.min_int, cfg.max_int + 1))
    n = int(rng.integers(1, cfg.max_list_len + 1))
    return [int(x) for x in rng.integers(cfg.min_int, cfg.max_int + 1, size=n)]


def random_list(rng: np.random.Generator, cfg: Config, length: int | None = None) -> list[int]:
    n = int(rng.integers(1, cfg.max_list_len + 1)) if length is None else length
    return [int(x) for x in rng.integers(cfg.min_int, cfg.max_int + 1, size=n)]


def random_fuzzy_state(rng: np.random.Generator, cfg: Config, tight: bool = True) -> np.ndarray:
    """A structurally valid fuzzy state: a mixture over value kinds whose
    per-kind mass is spread across each kind's columns.  Max column mass is
    exactly the kind-weight total (1 when tight).
    """
    rows, cols, vals = cfg.state_shape
    out = np.zeros(cfg.state_shape)
    weights = rng.dirichlet(np.ones(2 + cfg.max_list_len))
    if not tight:
        weights = weights * rng.uniform(0.2, 0.95)
    out[0, 0, 0] = weights[0]
    out[1, 0, :] = weights[1] * rng.dirichlet(np.ones(vals))
    for ell in range(1, cfg.max_list_len + 1):
        for j in range(ell):
            out[ell + 1, j, :] = weights[1 + ell] * rng.dirichlet(np.ones(vals))
    return out


def random_policy(rng: np.random.Generator, T: int, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n), size=T)


def encode_or_zero(v: Value, cfg: Config) -> np.ndarray:
    """Concrete-oracle encoding: Null carries no mass (the fuzzy transforms
    never track it).
    """
    if v is None:
        return np.zeros(cfg.state_shape)
    return encode(v, cfg)


def all_programs(T: int) -> list[tuple[Function, ...]]:
    return [tuple(p) for p in itertools.product(list(Function), repeat=T)]


def brute_force_superposition(pi: np.ndarray, inp: Value, cfg: Config) -> np.ndarray:
    """Sum of program-weight times concrete-output encoding over every
    program, the quantity the superposed forward pass claims to compute.
    """
    T = pi.shape[0]
    acc = np.zeros(cfg.state_shape)
    for program in all_programs(T):
        weight = 1.0
        for t, op in enumerate(program):
            weight *= pi[t, op]
        acc += weight * encode_or_zero(run_program(program, inp, cfg), cfg)
    return acc


# Per-slot interpreter mirroring the elementwise linear semantics: an
# out-of-range result kills only its own slot, not the whole list.

_DEAD = ("dead",)


def ghost_start(inp: list[int]) -> tuple:
    return ("list", tuple((True, v) for v in inp))


def _scalar(f: Function, v: int) -> int:
    table = {
        Function.PLUS1: v + 1,
        Function.MINUS1: v - 1,
        Function.TIMES2: 2 * v,
        Function.TIMES3: 3 * v,
        Function.TIMES4: 4 * v,
        Function.TIMESM1: -v,
        Function.POWER2: v * v,
        Function.DIV2: int(v / 2),
        Function.DIV3: int(v / 3),
        Function.DIV4: int(v / 4),
    }
    return table[f]


def ghost_step(f: Function, state: tuple, cfg: Config) -> tuple:
    if state[0] != "list":
        return _DEAD
    slots = state[1]
    if f == Function.HEAD:
        alive, v = slots[0]
        return ("int", alive, v)
    if f == Function.TAIL:
        alive, v = slots[-1]
        return ("int", alive, v)
    new = []
    for alive, v in slots:
        if not alive:
            new.append((False, v))
            continue
        w = _scalar(f, v)
        new.append((cfg.min_int <= w <= cfg.max_int, w))
    return ("list", tuple(new))


def ghost_run(program, inp: list[int], cfg: Config) -> tuple:
    state = ghost_start(inp)
    for f in program:
        state = ghost_step(f, state, cfg)
    return state


def ghost_encode(state: tuple, cfg: Config) -> np.ndarray:
    out = np.zeros(cfg.state_shape)
    if state[0] == "list":
        slots = state[1]
        for j, (alive, v) in enumerate(slots):
            if alive:
                out[len(slots) + 1, j, v - cfg.min_int] = 1.0
    elif state[0] == "int":
        _, alive, v = state
        if alive:
            out[1, 0, v - cfg.min_int] = 1.0
    return out


def ghost_superposition(pi: np.ndarray, inp: list[int], cfg: Config) -> np.ndarray:
    T = pi.shape[0]
    acc = np.zeros(cfg.state_shape)
    for program in all_programs(T):
        weight = 1.0
        for t, op in enumerate(program):
            weight *= pi[t, op]
        acc += weight * ghost_encode(ghost_run(program, inp, cfg), cfg)
    return acc


def fd_gradient(theta: np.ndarray, psi0: np.ndarray, psi_hat: np.ndarray, cfg: Config,
                h: float = 1e-5) -> np.ndarray:
    """Central finite differences of the engine's loss with respect to theta."""
    from gradsynth.engine import forward, loss, softmax

    grad = np.zeros_like(theta)
    for t in range(theta.shape[0]):
        for s in range(theta.shape[1]):
            bumped = theta.copy()
            bumped[t, s] = theta[t, s] + h
            up = loss(forward(softmax(bumped), psi0, cfg)[-1], psi_hat, cfg)
            bumped[t, s] = theta[t, s] - h
            down = loss(forward(softmax(bumped), psi0, cfg)[-1], psi_hat, cfg)
            grad[t, s] = (up - down) / (2.0 * h)
    return grad


def grad_close(analytic: np.ndarray, numeric: np.ndarray,
               rel: float = 1e-4, tiny: float = 1e-8) -> bool:
    """Spec comparison rule: relative error per entry, absolute for entries
    below the tiny threshold.
    """
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    small = scale < tiny
    diff = np.abs(analytic - numeric)
    ok_small = diff[small] <= tiny if small.any() else True
    with np.errstate(invalid="ignore", divide="ignore"):
        rel_err = np.where(small, 0.0, diff / np.maximum(scale, tiny))
    return bool(np.all(ok_small) and np.all(rel_err <= rel))
