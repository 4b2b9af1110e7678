# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: edit distance, 1D stripe IoU, triangular forward solve."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef Py_ssize_t _lev(str a, str b) except -1:
    cdef Py_ssize_t n, m, i, j, best, v
    cdef Py_ssize_t *prev
    cdef Py_ssize_t *cur
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 ca
    if len(a) < len(b):
        a, b = b, a
    n = len(a)
    m = len(b)
    if m == 0:
        return n
    prev = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    cur = <Py_ssize_t *> malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev)
        free(cur)
        raise MemoryError()
    for j in range(m + 1):
        prev[j] = j
    for i in range(1, n + 1):
        ca = a[i - 1]
        cur[0] = i
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if ca == b[j - 1] else 1)
            v = cur[j - 1] + 1
            if v < best:
                best = v
            v = prev[j] + 1
            if v < best:
                best = v
            cur[j] = best
        tmp = prev
        prev = cur
        cur = tmp
    best = prev[m]
    free(prev)
    free(cur)
    return best


def levenshtein(a, b):
    return _lev(str(a), str(b))


def levenshtein_to_many(a, candidates):
    cdef str sa = str(a)
    return [_lev(sa, str(c)) for c in candidates]


def iou_1d(pred, truth):
    cdef double[::1] p = np.ascontiguousarray(pred, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(truth, dtype=np.float64)
    cdef Py_ssize_t n_pred = p.shape[0], n_truth = t.shape[0]
    cdef Py_ssize_t n = n_pred if n_pred > n_truth else n_truth
    cdef Py_ssize_t k = n_pred if n_pred < n_truth else n_truth
    cdef Py_ssize_t i
    cdef double total = 0.0, lo_p = 0.0, lo_t = 0.0, hi_p, hi_t, inter, union
    if n == 0:
        return 1.0
    for i in range(k):
        hi_p = p[i]
        hi_t = t[i]
        inter = (hi_p if hi_p < hi_t else hi_t) - (lo_p if lo_p > lo_t else lo_t)
        union = (hi_p if hi_p > hi_t else hi_t) - (lo_p if lo_p < lo_t else lo_t)
        if union <= 0.0:
            if lo_p == lo_t and hi_p == hi_t:
                total += 1.0
        elif inter > 0.0:
            total += inter / union
        lo_p = hi_p
        lo_t = hi_t
    return total / n


def forward_substitute(lower, rhs):
    cdef double[:, :] L = np.asarray(lower, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t k = b.shape[0], i, j
    cdef double acc
    out = np.zeros(k, dtype=np.float64)
    cdef double[::1] x = out
    for i in range(k):
        acc = b[i]
        for j in range(i):
            acc -= L[i, j] * x[j]
        x[i] = acc / L[i, i]
    return out
