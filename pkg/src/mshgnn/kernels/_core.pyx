# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled row gather / segment-sum kernels for message passing.

Semantics match `mshgnn.kernels.numpy_backend` exactly, including the
summation order inside a segment (sequential over rows), so both backends
agree bit-for-bit on the graph sizes used here.
"""

import numpy as np

cimport cython
cimport numpy as cnp

ctypedef fused floating:
    float
    double


@cython.boundscheck(False)
@cython.wraparound(False)
def gather_rows(floating[:, ::1] x, cnp.intp_t[::1] idx):
    """out[k] = x[idx[k]] for each row index in idx."""
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t h = x.shape[1]
    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out_arr = np.empty((n, h), dtype=dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t k, j, r
    for k in range(n):
        r = idx[k]
        for j in range(h):
            out[k, j] = x[r, j]
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def segment_sum_rows(floating[:, ::1] x, cnp.intp_t[::1] starts):
    """Sum contiguous row segments: out[s] = sum of x[starts[s]:starts[s+1]].

    Empty segments yield zero rows. starts must be nondecreasing with
    starts[0] == 0 and starts[-1] == len(x).
    """
    cdef Py_ssize_t ns = starts.shape[0] - 1
    cdef Py_ssize_t h = x.shape[1]
    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out_arr = np.zeros((ns, h), dtype=dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t s, i, j
    for s in range(ns):
        for i in range(starts[s], starts[s + 1]):
            for j in range(h):
                out[s, j] += x[i, j]
    return out_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def gather_segment_sum_rows(floating[:, ::1] x, cnp.intp_t[::1] order,
                            cnp.intp_t[::1] starts):
    """Fused segment_sum_rows(gather_rows(x, order), starts) without the copy."""
    cdef Py_ssize_t ns = starts.shape[0] - 1
    cdef Py_ssize_t h = x.shape[1]
    if floating is float:
        dtype = np.float32
    else:
        dtype = np.float64
    out_arr = np.zeros((ns, h), dtype=dtype)
    cdef floating[:, ::1] out = out_arr
    cdef Py_ssize_t s, i, j, r
    for s in range(ns):
        for i in range(starts[s], starts[s + 1]):
            r = order[i]
            for j in range(h):
                out[s, j] += x[r, j]
    return out_arr
