# Compiled enumeration scan.  Mirrors fallback.enum_scan addition for
# addition (seed with high-rule bits, doubling over the low bits, guarded
# division, strict ascending min/max scan) so both backends produce
# bit-identical candidates; the extension is built with -ffp-contract=off
# to keep it that way.  Rows run in parallel under OpenMP; each row's scan
# is sequential, so thread count never changes results.

import numpy as np

cimport cython
cimport openmp
from cython.parallel cimport prange, threadid
from libc.math cimport INFINITY


@cython.boundscheck(False)
@cython.wraparound(False)
def enum_scan(alpha0, alpha, beta0, beta, double eps, int chunk_bits):
    cdef double[::1] a0 = np.ascontiguousarray(alpha0, dtype=np.float64)
    cdef double[:, ::1] a = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef double[::1] b0 = np.ascontiguousarray(beta0, dtype=np.float64)
    cdef double[:, ::1] b = np.ascontiguousarray(beta, dtype=np.float64)

    cdef Py_ssize_t nrows = a.shape[0]
    cdef int p = <int> a.shape[1]
    cdef int k = p if p < chunk_bits else chunk_bits
    cdef Py_ssize_t cols = (<Py_ssize_t> 1) << k
    cdef long long nchunks = (<long long> 1) << (p - k)

    ylo_arr = np.empty(nrows, dtype=np.float64)
    yhi_arr = np.empty(nrows, dtype=np.float64)
    jmin_arr = np.zeros(nrows, dtype=np.int64)
    jmax_arr = np.zeros(nrows, dtype=np.int64)
    cdef double[::1] ylo = ylo_arr
    cdef double[::1] yhi = yhi_arr
    cdef long long[::1] jmin = jmin_arr
    cdef long long[::1] jmax = jmax_arr

    cdef int max_threads = openmp.omp_get_max_threads()
    scratch = np.empty((max_threads, 2 * cols), dtype=np.float64)
    cdef double[:, ::1] sc = scratch

    cdef Py_ssize_t r, t, width
    cdef long long chunk, start, bj_lo, bj_hi
    cdef int q, i
    cdef double bx, bz, y, best_lo, best_hi, bit, av, bv
    cdef double *sx
    cdef double *sz

    with nogil:
        for r in prange(nrows, schedule="static"):
            sx = &sc[threadid(), 0]
            sz = &sc[threadid(), cols]
            best_lo = INFINITY
            best_hi = -INFINITY
            bj_lo = 0
            bj_hi = 0
            for chunk in range(nchunks):
                start = chunk << k
                bx = a0[r]
                bz = b0[r]
                for q in range(p - k):
                    bit = <double> ((start >> (p - 1 - q)) & 1)
                    bx = bx + a[r, q] * bit
                    bz = bz + b[r, q] * bit
                sx[0] = bx
                sz[0] = bz
                width = 1
                for i in range(k):
                    av = a[r, p - 1 - i]
                    bv = b[r, p - 1 - i]
                    for t in range(width):
                        sx[width + t] = sx[t] + av
                        sz[width + t] = sz[t] + bv
                    width = width * 2
                for t in range(cols):
                    y = sx[t] / (sz[t] + eps)
                    if y < best_lo:
                        best_lo = y
                        bj_lo = start + t
                    if y > best_hi:
                        best_hi = y
                        bj_hi = start + t
            ylo[r] = best_lo
            yhi[r] = best_hi
            jmin[r] = bj_lo
            jmax[r] = bj_hi

    return ylo_arr, yhi_arr, jmin_arr, jmax_arr
