"""Vectorized numpy implementation of the hot state-transform kernels.

All kernels take preallocated outputs and fully overwrite them.  Batch tensors
have shape (examples, rows, cols, vals) in C order, float64.  The compiled
backend implements the same contract; tests hold the two to agreement.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_HEAD = 0
_TAIL = 1


def transform_batch(src: np.ndarray, f: int, tables, out: np.ndarray) -> None:
    """out = T_f(src) for one DSL function."""
    out[:] = 0.0
    if f == _HEAD:
        out[:, 1, 0, :] = src[:, 2:, 0, :].sum(axis=1)
        return
    if f == _TAIL:
        out[:, 1, 0, :] = src[:, tables.tail_rows, tables.tail_cols, :].sum(axis=1)
        return
    blk = src[:, 2:, :, :] * tables.region_block
    for src_idx, tgt_idx in tables.scatter_groups[f]:
        out[:, 2:, :, tgt_idx] += blk[:, :, :, src_idx]


def transform_adjoint_batch(src: np.ndarray, f: int, tables, out: np.ndarray) -> None:
    """out = T_f^T(src), the transpose of transform_batch's linear map."""
    out[:] = 0.0
    if f == _HEAD:
        out[:, 2:, 0, :] = src[:, 1, 0, :][:, None, :]
        return
    if f == _TAIL:
        out[:, tables.tail_rows, tables.tail_cols, :] = src[:, 1, 0, :][:, None, :]
        return
    ks, ts = tables.gather_pairs[f]
    out[:, 2:, :, ks] = src[:, 2:, :, ts] * tables.region_block


def forward_step(src: np.ndarray, weights: np.ndarray, tables, out: np.ndarray) -> None:
    """out = sum_s weights[s] * T_s(src), the superposed one-step update."""
    out[:] = 0.0
    out[:, 1, 0, :] = weights[_HEAD] * src[:, 2:, 0, :].sum(axis=1)
    out[:, 1, 0, :] += weights[_TAIL] * src[:, tables.tail_rows, tables.tail_cols, :].sum(axis=1)
    blk = src[:, 2:, :, :] * tables.region_block
    for f in range(2, len(weights)):
        w = weights[f]
        if w == 0.0:
            continue
        for src_idx, tgt_idx in tables.scatter_groups[f]:
            out[:, 2:, :, tgt_idx] += w * blk[:, :, :, src_idx]


def backward_step(
    a: np.ndarray,
    psi_prev: np.ndarray,
    weights: np.ndarray,
    tables,
    grad_out: np.ndarray,
    a_prev: np.ndarray,
) -> None:
    """Reverse one superposed step.

    Fills grad_out[s] = <T_s^T(a), psi_prev> and a_prev = sum_s weights[s] *
    T_s^T(a).
    """
    grad_out[:] = 0.0
    a_prev[:] = 0.0

    ga = a[:, 1, 0, :][:, None, :]
    grad_out[_HEAD] = float((ga * psi_prev[:, 2:, 0, :]).sum())
    a_prev[:, 2:, 0, :] += weights[_HEAD] * ga

    tail_src = psi_prev[:, tables.tail_rows, tables.tail_cols, :]
    grad_out[_TAIL] = float((ga * tail_src).sum())
    a_prev[:, tables.tail_rows, tables.tail_cols, :] += weights[_TAIL] * ga

    blk = psi_prev[:, 2:, :, :]
    for f in range(2, len(weights)):
        ks, ts = tables.gather_pairs[f]
        g = a[:, 2:, :, ts] * tables.region_block
        grad_out[f] = float((g * blk[:, :, :, ks]).sum())
        if weights[f] != 0.0:
            a_prev[:, 2:, :, ks] += weights[f] * g
