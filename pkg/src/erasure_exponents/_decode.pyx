# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled threshold decoder for batches of received words."""

import numpy as np
from libc.math cimport exp, log, INFINITY


def decode_batch(const double[:, :, ::1] W, const int[:, ::1] ys, double n_threshold):
    """Decisions for each row of ``ys``; -1 marks an erasure.

    ``W[i, b, m]`` is ln P(b | x_m[i]). Message m is accepted when
    ln P(y|x_m) - ln sum_{m' != m} P(y|x_m') >= n_threshold; only the
    likelihood maximizer can pass, so it is the only one tested.
    """
    cdef Py_ssize_t B = ys.shape[0], n = ys.shape[1], M = W.shape[2]
    cdef Py_ssize_t b, i, m, best
    cdef double vmax, rest
    cdef const double* row
    cdef const double* base = &W[0, 0, 0]
    cdef Py_ssize_t letter_stride = W.shape[1] * M
    out = np.empty(B, dtype=np.int64)
    acc_arr = np.empty(M, dtype=np.float64)
    cdef long long[::1] dec = out
    cdef double[::1] acc_view = acc_arr
    cdef double* acc = &acc_view[0]
    with nogil:
        for b in range(B):
            row = base + ys[b, 0] * M
            for m in range(M):
                acc[m] = row[m]
            for i in range(1, n):
                row = base + i * letter_stride + ys[b, i] * M
                for m in range(M):
                    acc[m] += row[m]
            best = 0
            vmax = acc[0]
            for m in range(1, M):
                if acc[m] > vmax:
                    vmax = acc[m]
                    best = m
            if vmax == -INFINITY:
                dec[b] = -1
                continue
            rest = 0.0
            for m in range(M):
                if m != best:
                    rest += exp(acc[m] - vmax)
            if rest == 0.0 or -log(rest) >= n_threshold:
                dec[b] = best
            else:
                dec[b] = -1
    return out
