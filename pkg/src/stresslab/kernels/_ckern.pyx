# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluator for non-metric stress on a fixed pair table.

Mirrors kernels.pure operation for operation: distances, per-block sort,
pool-adjacent-violators with the same cross-multiplied merge test, then the
residual ratio. Picked automatically at import time when present.
"""
from libc.math cimport sqrt
from libc.stdlib cimport free, malloc, qsort

import numpy as np

NAME = "compiled"


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*>a)[0]
    cdef double y = (<const double*>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef class StressEvaluator:
    cdef int[::1] pi
    cdef int[::1] pj
    cdef int[::1] starts
    cdef double* drawn
    cdef double* sums
    cdef long long* counts
    cdef Py_ssize_t npairs

    def __cinit__(self, pi, pj, block_starts):
        self.pi = np.ascontiguousarray(pi, dtype=np.int32)
        self.pj = np.ascontiguousarray(pj, dtype=np.int32)
        self.starts = np.ascontiguousarray(block_starts, dtype=np.int32)
        self.npairs = self.pi.shape[0]
        self.drawn = <double*>malloc(self.npairs * sizeof(double))
        self.sums = <double*>malloc(self.npairs * sizeof(double))
        self.counts = <long long*>malloc(self.npairs * sizeof(long long))
        if self.drawn == NULL or self.sums == NULL or self.counts == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.drawn)
        free(self.sums)
        free(self.counts)

    def __call__(self, pos):
        # const view: positions arrive as read-only arrays from Drawing
        cdef const double[:, ::1] xy = np.ascontiguousarray(pos, dtype=np.float64)
        cdef double s
        with nogil:
            s = self._eval(&xy[0, 0])
        return s

    cdef double _eval(self, const double* xy) noexcept nogil:
        cdef Py_ssize_t k, b, t, top, p
        cdef Py_ssize_t nblocks = self.starts.shape[0] - 1
        cdef double dx, dy, e, mean, r
        cdef double den = 0.0
        cdef double num = 0.0
        for k in range(self.npairs):
            dx = xy[2 * self.pi[k]] - xy[2 * self.pj[k]]
            dy = xy[2 * self.pi[k] + 1] - xy[2 * self.pj[k] + 1]
            e = sqrt(dx * dx + dy * dy)
            self.drawn[k] = e
            den += e * e
        if den == 0.0:
            return -1.0
        for b in range(nblocks):
            qsort(self.drawn + self.starts[b],
                  self.starts[b + 1] - self.starts[b],
                  sizeof(double), _cmp_double)
        top = 0
        for k in range(self.npairs):
            self.sums[top] = self.drawn[k]
            self.counts[top] = 1
            while top > 0 and self.sums[top - 1] * self.counts[top] > self.sums[top] * self.counts[top - 1]:
                self.sums[top - 1] += self.sums[top]
                self.counts[top - 1] += self.counts[top]
                top -= 1
            top += 1
        p = 0
        for b in range(top):
            mean = self.sums[b] / self.counts[b]
            for t in range(self.counts[b]):
                r = self.drawn[p] - mean
                num += r * r
                p += 1
        return sqrt(num / den)


def kruskal_stress_sorted(pos, pi, pj, block_starts):
    cdef StressEvaluator ev = StressEvaluator(pi, pj, block_starts)
    return ev(pos)
