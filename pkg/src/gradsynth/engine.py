"""Superposed forward execution, loss, analytic gradients, and synthesis.

The forward pass propagates a probability-weighted mixture of all DSL
transforms at every step; because each transform is linear in the state,
the final tensor equals the probability-weighted sum over all n^T concrete
program outcomes without ever enumerating them.
"""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from gradsynth.dsl import Function, Program, run_program, tables_for
from gradsynth.kernels import get_backend
from gradsynth.state import Config, encode_batch

# Clamp inside log and adjoint denominators; state entries can be exactly 0.
EPS = 1e-12
# Loss below this plus a consistent argmax program counts as converged.
CONVERGENCE_LOSS = 1e-9


def softmax(theta: np.ndarray) -> np.ndarray:
    """Rowwise softmax of a (T, n) logit matrix."""
    shifted = theta - theta.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def forward(pi: np.ndarray, psi_in: np.ndarray, cfg: Config, backend: str | None = None) -> list[np.ndarray]:
    """Run the superposed forward pass, returning all states psi_0 .. psi_T.

    pi is a (T, n) probability matrix; psi_in a batch state (m, ...).
    """
    if psi_in.shape[1:] != cfg.state_shape:
        raise ValueError(f"state shape {psi_in.shape[1:]} does not match config {cfg.state_shape}")
    if pi.ndim != 2 or pi.shape[1] != cfg.num_functions:
        raise ValueError(f"policy shape {pi.shape} does not match {cfg.num_functions} functions")
    kern = get_backend(backend)
    tables = tables_for(cfg)
    pi = np.ascontiguousarray(pi, dtype=np.float64)
    states = [np.ascontiguousarray(psi_in, dtype=np.float64)]
    for t in range(pi.shape[0]):
        out = np.empty_like(states[-1])
        kern.forward_step(states[-1], pi[t], tables, out)
        states.append(out)
    return states


def _check_targets(psi_hat: np.ndarray) -> float:
    if np.any(psi_hat[:, 0, 0, 0] > 0):
        raise ValueError("target outputs must not be Null")
    n_tokens = float(psi_hat[:, 1:].sum())
    if n_tokens <= 0:
        raise ValueError("target state carries no token mass")
    return n_tokens


def loss(psi_out: np.ndarray, psi_hat: np.ndarray, cfg: Config) -> float:
    """Cross-entropy of psi_out against a sharp target batch, averaged per token."""
    n_tokens = _check_targets(psi_hat)
    logs = np.log(np.maximum(psi_out[:, 1:], EPS))
    return float(-(psi_hat[:, 1:] * logs).sum() / n_tokens)


def gradient(pi: np.ndarray, trajectory: list[np.ndarray], psi_hat: np.ndarray, cfg: Config,
             backend: str | None = None) -> np.ndarray:
    """Loss gradient with respect to the logits, via the adjoint recursion.

    trajectory must be the forward() output for this pi (length T+1).
    """
    T = pi.shape[0]
    if len(trajectory) != T + 1:
        raise ValueError(f"trajectory has {len(trajectory)} states, policy expects {T + 1}")
    n_tokens = _check_targets(psi_hat)
    kern = get_backend(backend)
    tables = tables_for(cfg)
    pi = np.ascontiguousarray(pi, dtype=np.float64)

    adj = np.zeros_like(trajectory[-1])
    adj[:, 1:] = -psi_hat[:, 1:] / (n_tokens * np.maximum(trajectory[-1][:, 1:], EPS))
    grad_pi = np.empty((T, cfg.num_functions))
    adj_prev = np.empty_like(adj)
    for t in range(T, 0, -1):
        kern.backward_step(adj, trajectory[t - 1], pi[t - 1], tables, grad_pi[t - 1], adj_prev)
        adj, adj_prev = adj_prev, adj
    return _softmax_chain(pi, grad_pi)


def _softmax_chain(pi: np.ndarray, grad_pi: np.ndarray) -> np.ndarray:
    inner = (pi * grad_pi).sum(axis=1, keepdims=True)
    return pi * (grad_pi - inner)


def extract_program(pi: np.ndarray) -> Program:
    """Argmax program; ties resolve to the lowest function index."""
    return tuple(Function(int(s)) for s in pi.argmax(axis=1))


def program_consistent(program: Program, pairs: list[tuple], cfg: Config) -> bool:
    """True when the program maps every input to its paired output exactly."""
    return all(run_program(program, inp, cfg) == out for inp, out in pairs)


@dataclasses.dataclass(frozen=True)
class SynthOptions:
    timeout: float = 5.0
    learning_rate: float = 0.2
    momentum: float = 0.0
    restart_iters: int = 200
    # None: keep restarting until the timeout.  1 gives a single descent.
    max_restarts: int | None = None
    init_logits: np.ndarray | None = None
    structural_prior: bool = False
    backend: str | None = None


@dataclasses.dataclass
class SynthesisResult:
    program: Program
    final_loss: float | None
    consistent: bool
    restarts_used: int
    wall_time: float
    # (loss, consistent) per restart, for bookkeeping audits.
    history: list[tuple[float, bool]] = dataclasses.field(default_factory=list)


class _Descent:
    """One sample's reusable optimization state: buffers, tables, targets."""

    def __init__(self, psi0: np.ndarray, psi_hat: np.ndarray, T: int, cfg: Config, opts: SynthOptions):
        self.cfg = cfg
        self.opts = opts
        self.T = T
        self.kern = get_backend(opts.backend)
        self.tables = tables_for(cfg)
        self.n_tokens = _check_targets(psi_hat)
        self.hat_idx = np.nonzero(psi_hat)
        self.hat_vals = psi_hat[self.hat_idx]
        self.states = [psi0] + [np.empty_like(psi0) for _ in range(T)]
        # adj_hat only ever receives the scatter below, so its zeros persist.
        self.adj_hat = np.zeros_like(psi0)
        self.adj_a = np.empty_like(psi0)
        self.adj_b = np.empty_like(psi0)
        self.grad_pi = np.empty((T, cfg.num_functions))

    def run_forward(self, pi: np.ndarray) -> float:
        for t in range(self.T):
            self.kern.forward_step(self.states[t], pi[t], self.tables, self.states[t + 1])
        picked = np.maximum(self.states[-1][self.hat_idx], EPS)
        return float(-(self.hat_vals * np.log(picked)).sum() / self.n_tokens)

    def run_backward(self, pi: np.ndarray) -> np.ndarray:
        picked = np.maximum(self.states[-1][self.hat_idx], EPS)
        self.adj_hat[self.hat_idx] = -self.hat_vals / (self.n_tokens * picked)
        adj, adj_prev = self.adj_hat, self.adj_a
        for t in range(self.T, 0, -1):
            self.kern.backward_step(adj, self.states[t - 1], pi[t - 1], self.tables,
                                    self.grad_pi[t - 1], adj_prev)
            adj = adj_prev
            adj_prev = self.adj_b if adj is self.adj_a else self.adj_a
        return self.grad_pi

    def descend(self, theta: np.ndarray, pairs: list[tuple], deadline: float) -> tuple[np.ndarray, float, bool]:
        """Gradient descent from theta; returns (theta, loss, converged)."""
        opts = self.opts
        velocity = np.zeros_like(theta) if opts.momentum else None
        for it in range(opts.restart_iters):
            if it > 0 and time.perf_counter() >= deadline:
                break
            pi = softmax(theta)
            cur_loss = self.run_forward(pi)
            if cur_loss < CONVERGENCE_LOSS:
                program = extract_program(pi)
                if program_consistent(program, pairs, self.cfg):
                    return theta, cur_loss, True
            grad_theta = _softmax_chain(pi, self.run_backward(pi))
            if velocity is None:
                theta = theta - opts.learning_rate * grad_theta
            else:
                velocity = opts.momentum * velocity + grad_theta
                theta = theta - opts.learning_rate * velocity
        final_loss = self.run_forward(softmax(theta))
        return theta, final_loss, False


def _better(cand: SynthesisResult, best: SynthesisResult | None) -> bool:
    if best is None:
        return True
    if cand.consistent != best.consistent:
        return cand.consistent
    return cand.final_loss < best.final_loss


def synthesize(sample, cfg: Config, opts: SynthOptions, rng: np.random.Generator | None = None) -> SynthesisResult:
    """Search for a length-T program matching the sample's observed pairs.

    Gradient descent on the policy logits, restarting from fresh random
    draws until the wall-clock timeout; init_logits, when given, seeds the
    first restart only.  Consistent results beat inconsistent ones; ties
    break toward lower loss.
    """
    if opts.timeout <= 0:
        raise ValueError("timeout must be positive")
    if opts.max_restarts is not None and opts.max_restarts < 1:
        raise ValueError("max_restarts must be at least 1")
    if not sample.observed:
        raise ValueError("sample has no observed examples")
    rng = np.random.default_rng() if rng is None else rng

    T = sample.length
    n = cfg.num_functions
    if opts.init_logits is not None and opts.init_logits.shape != (T, n):
        raise ValueError(f"init logits shape {opts.init_logits.shape} does not match ({T}, {n})")

    pairs = list(sample.observed)
    psi0 = encode_batch([inp for inp, _ in pairs], cfg)
    psi_hat = encode_batch([out for _, out in pairs], cfg)
    desc = _Descent(psi0, psi_hat, T, cfg, opts)

    start = time.perf_counter()
    deadline = start + opts.timeout
    best: SynthesisResult | None = None
    history: list[tuple[float, bool]] = []
    restarts = 0
    while True:
        if restarts == 0 and opts.init_logits is not None:
            theta = np.array(opts.init_logits, dtype=np.float64)
        else:
            theta = rng.standard_normal((T, n))
        if opts.structural_prior and T > 1:
            # head/tail anywhere but last place forces Null outputs.
            theta[:-1, Function.HEAD] = -30.0
            theta[:-1, Function.TAIL] = -30.0
        theta, final_loss, converged = desc.descend(theta, pairs, deadline)
        restarts += 1
        program = extract_program(softmax(theta))
        consistent = converged or program_consistent(program, pairs, cfg)
        history.append((final_loss, consistent))
        cand = SynthesisResult(program, final_loss, consistent, restarts, 0.0)
        if _better(cand, best):
            best = cand
        if consistent and final_loss < CONVERGENCE_LOSS:
            break
        if opts.max_restarts is not None and restarts >= opts.max_restarts:
            break
        if time.perf_counter() >= deadline:
            break
    best.restarts_used = restarts
    best.wall_time = time.perf_counter() - start
    best.history = history
    return best
