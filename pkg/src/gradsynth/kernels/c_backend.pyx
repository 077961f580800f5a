# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled state-transform kernels.

Same contract as np_backend: preallocated float64 C-contiguous outputs, fully
overwritten.  Loops skip list rows whose readable region is entirely zero,
which is the common case since each example occupies one list length.
"""

from libc.string cimport memset

NAME = "c"


cdef inline void zero4(double[:, :, :, ::1] t) noexcept nogil:
    memset(&t[0, 0, 0, 0],
           0,
           t.shape[0] * t.shape[1] * t.shape[2] * t.shape[3] * sizeof(double))


cdef inline bint row_any(double[:, :, :, ::1] t, Py_ssize_t m, Py_ssize_t i) noexcept nogil:
    # True when the readable columns (j <= i-2) of list row i hold any mass.
    cdef Py_ssize_t j, k
    for j in range(i - 1):
        for k in range(t.shape[3]):
            if t[m, i, j, k] != 0.0:
                return True
    return False


cdef void c_transform(double[:, :, :, ::1] src, int f, int[:, ::1] sigma,
                      double[:, :, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t M = src.shape[0], I = src.shape[1], K = src.shape[3]
    cdef Py_ssize_t m, i, j, k
    cdef int t
    zero4(out)
    if f == 0:
        for m in range(M):
            for i in range(2, I):
                for k in range(K):
                    out[m, 1, 0, k] += src[m, i, 0, k]
    elif f == 1:
        for m in range(M):
            for i in range(2, I):
                for k in range(K):
                    out[m, 1, 0, k] += src[m, i, i - 2, k]
    else:
        for m in range(M):
            for i in range(2, I):
                if not row_any(src, m, i):
                    continue
                for j in range(i - 1):
                    for k in range(K):
                        t = sigma[f, k]
                        if t >= 0:
                            out[m, i, j, t] += src[m, i, j, k]


cdef void c_adjoint(double[:, :, :, ::1] src, int f, int[:, ::1] sigma,
                    double[:, :, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t M = src.shape[0], I = src.shape[1], K = src.shape[3]
    cdef Py_ssize_t m, i, j, k
    cdef int t
    zero4(out)
    if f == 0:
        for m in range(M):
            for i in range(2, I):
                for k in range(K):
                    out[m, i, 0, k] = src[m, 1, 0, k]
    elif f == 1:
        for m in range(M):
            for i in range(2, I):
                for k in range(K):
                    out[m, i, i - 2, k] = src[m, 1, 0, k]
    else:
        for m in range(M):
            for i in range(2, I):
                for j in range(i - 1):
                    for k in range(K):
                        t = sigma[f, k]
                        if t >= 0:
                            out[m, i, j, k] = src[m, i, j, t]


cdef void c_forward_step(double[:, :, :, ::1] src, double[::1] w, int[:, ::1] sigma,
                         double[:, :, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t M = src.shape[0], I = src.shape[1], K = src.shape[3]
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t m, i, j, k, s
    cdef int t
    cdef double w0 = w[0], w1 = w[1], ws
    zero4(out)
    for m in range(M):
        for i in range(2, I):
            if not row_any(src, m, i):
                continue
            for k in range(K):
                out[m, 1, 0, k] += w0 * src[m, i, 0, k] + w1 * src[m, i, i - 2, k]
            for j in range(i - 1):
                for s in range(2, n):
                    ws = w[s]
                    if ws == 0.0:
                        continue
                    for k in range(K):
                        t = sigma[s, k]
                        if t >= 0:
                            out[m, i, j, t] += ws * src[m, i, j, k]


cdef void c_backward_step(double[:, :, :, ::1] a, double[:, :, :, ::1] psi_prev,
                          double[::1] w, int[:, ::1] sigma,
                          double[::1] grad, double[:, :, :, ::1] a_prev) noexcept nogil:
    cdef Py_ssize_t M = a.shape[0], I = a.shape[1], K = a.shape[3]
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t m, i, j, k, s
    cdef int t
    cdef double w0 = w[0], w1 = w[1], ws, v
    cdef bint ga_any
    memset(&grad[0], 0, n * sizeof(double))
    zero4(a_prev)
    for m in range(M):
        ga_any = False
        for k in range(K):
            if a[m, 1, 0, k] != 0.0:
                ga_any = True
                break
        for i in range(2, I):
            if ga_any:
                for k in range(K):
                    v = a[m, 1, 0, k]
                    grad[0] += v * psi_prev[m, i, 0, k]
                    grad[1] += v * psi_prev[m, i, i - 2, k]
                    a_prev[m, i, 0, k] += w0 * v
                    a_prev[m, i, i - 2, k] += w1 * v
            if not row_any(a, m, i):
                continue
            for j in range(i - 1):
                for s in range(2, n):
                    ws = w[s]
                    for k in range(K):
                        t = sigma[s, k]
                        if t >= 0:
                            v = a[m, i, j, t]
                            grad[s] += v * psi_prev[m, i, j, k]
                            a_prev[m, i, j, k] += ws * v


def transform_batch(double[:, :, :, ::1] src not None, int f, object tables,
                    double[:, :, :, ::1] out not None):
    """out = T_f(src) for one DSL function."""
    cdef int[:, ::1] sigma = tables.index_map
    c_transform(src, f, sigma, out)


def transform_adjoint_batch(double[:, :, :, ::1] src not None, int f, object tables,
                            double[:, :, :, ::1] out not None):
    """out = T_f^T(src), the transpose of transform_batch's linear map."""
    cdef int[:, ::1] sigma = tables.index_map
    c_adjoint(src, f, sigma, out)


def forward_step(double[:, :, :, ::1] src not None, double[::1] weights not None,
                 object tables, double[:, :, :, ::1] out not None):
    """out = sum_s weights[s] * T_s(src), the superposed one-step update."""
    cdef int[:, ::1] sigma = tables.index_map
    c_forward_step(src, weights, sigma, out)


def backward_step(double[:, :, :, ::1] a not None, double[:, :, :, ::1] psi_prev not None,
                  double[::1] weights not None, object tables,
                  double[::1] grad_out not None, double[:, :, :, ::1] a_prev not None):
    """grad_out[s] = <T_s^T(a), psi_prev>; a_prev = sum_s weights[s] * T_s^T(a)."""
    cdef int[:, ::1] sigma = tables.index_map
    c_backward_step(a, psi_prev, weights, sigma, grad_out, a_prev)
