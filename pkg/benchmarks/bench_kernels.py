"""Timing comparison of the compiled and pure-numpy kernel backends.

Measures the two hot operations — a full forward step (12 weighted
transforms + accumulate) and a full backward step (adjoint transforms,
policy gradient, adjoint propagation) — at a few batch sizes, plus one
end-to-end synthesis descent per backend.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from gradsynth.datagen import DatasetSpec, gen_dataset
from gradsynth.dsl import tables_for
from gradsynth.engine import SynthOptions, encode_batch, synthesize
from gradsynth.kernels import available_backends, get_backend
from gradsynth.state import Config

CFG = Config()


def random_states(rng, m):
    """Batch of valid-support random states (not normalized; timing only)."""
    batch = np.zeros(CFG.batch_shape(m))
    for s in batch:
        s[0, 0, 0] = rng.random()
        s[1, 0, :] = rng.random(CFG.num_values)
        for i in range(2, CFG.max_list_len + 2):
            s[i, : i - 1, :] = rng.random((i - 1, CFG.num_values))
    return batch


def time_op(fn, *args, repeats=50):
    fn(*args)  # warm-up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_steps(backend_name, rng):
    be = get_backend(backend_name)
    tables = tables_for(CFG)
    rows = []
    for m in (1, 5, 20):
        src = random_states(rng, m)
        out = np.empty_like(src)
        weights = rng.dirichlet(np.ones(CFG.num_functions))
        fwd = time_op(be.forward_step, src, weights, tables, out)

        adj = random_states(rng, m)
        grad = np.empty(CFG.num_functions)
        adj_prev = np.empty_like(src)
        bwd = time_op(be.backward_step, adj, src, weights, tables, grad, adj_prev)
        rows.append((m, fwd, bwd))
    return rows


def bench_synthesis(backend_name):
    samples = gen_dataset(DatasetSpec(num_samples=3, program_length=3, seed=7), CFG)
    opts = SynthOptions(timeout=60.0, max_restarts=2, backend=backend_name)
    t0 = time.perf_counter()
    iters = 0
    for i, sample in enumerate(samples):
        res = synthesize(sample, CFG, opts, np.random.default_rng(i))
        iters += res.restarts_used * opts.restart_iters
    elapsed = time.perf_counter() - t0
    return elapsed, elapsed / iters


def main():
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"state shape {CFG.state_shape}, {CFG.num_functions} functions\n")

    results = {}
    for name in backends:
        rng = np.random.default_rng(0)
        results[name] = bench_steps(name, rng)

    header = f"{'batch':>5} " + "".join(f"{name + ' fwd':>14}{name + ' bwd':>14}"
                                        for name in backends)
    print(header)
    for idx, m in enumerate((1, 5, 20)):
        row = f"{m:>5} "
        for name in backends:
            _, fwd, bwd = results[name][idx]
            row += f"{fwd * 1e3:>12.3f}ms{bwd * 1e3:>12.3f}ms"
        print(row)

    if len(backends) > 1:
        print("\nspeedup (python / c):")
        for idx, m in enumerate((1, 5, 20)):
            _, pf, pb = results["python"][idx]
            _, cf, cb = results["c"][idx]
            print(f"  batch {m:>2}: forward {pf / cf:4.1f}x   backward {pb / cb:4.1f}x")

    print("\nend-to-end descent (3 samples, length 3, 2 restarts each):")
    for name in backends:
        total, per_iter = bench_synthesis(name)
        print(f"  {name:>6}: {total:6.2f}s total, {per_iter * 1e3:.2f}ms per iteration")


if __name__ == "__main__":
    main()
