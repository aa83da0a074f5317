# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()


def interp(x, positions, table, long oversample, long half_width):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(positions, dtype=np.float64)
    cdef const double[::1] tv = np.ascontiguousarray(table, dtype=np.float64)
    cdef Py_ssize_t n_out = pv.shape[0]
    cdef Py_ssize_t n_x = xv.shape[0]
    out = np.zeros(n_out, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, m, j
    cdef long k, base
    cdef long limit = half_width * oversample
    cdef double p, frac, u, w, acc, h
    with nogil:
        for i in range(n_out):
            p = pv[i]
            base = <long>floor(p)
            frac = p - base
            if frac == 0.0:
                if base >= 0 and base < n_x:
                    ov[i] = xv[base]
                continue
            acc = 0.0
            for k in range(-half_width + 1, half_width + 1):
                m = base + k
                if m < 0 or m >= n_x:
                    continue
                u = fabs(frac - k) * oversample
                j = <Py_ssize_t>u
                if j > limit:
                    j = limit
                w = u - j
                h = tv[j] * (1.0 - w) + tv[j + 1] * w
                acc += xv[m] * h
            ov[i] = acc
    return out


def slot_correlate(r, starts, refs, long max_lag):
    cdef const double[::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const long long[::1] sv = np.ascontiguousarray(starts, dtype=np.int64)
    cdef const double[:, ::1] fv = np.ascontiguousarray(refs, dtype=np.float64)
    cdef Py_ssize_t n_slots = sv.shape[0]
    cdef Py_ssize_t n_refs = fv.shape[0]
    cdef Py_ssize_t n_len = fv.shape[1]
    cdef Py_ssize_t n_r = rv.shape[0]
    cdef Py_ssize_t n_lags = 2 * max_lag + 1
    out = np.zeros((n_slots, n_lags, n_refs), dtype=np.float64)
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t s, l, k, m, base, m_lo, m_hi
    cdef double acc
    with nogil:
        for s in range(n_slots):
            for l in range(n_lags):
                base = sv[s] + l - max_lag
                # samples outside r count as zero
                m_lo = 0 if base >= 0 else -base
                m_hi = n_len if base + n_len <= n_r else n_r - base
                for k in range(n_refs):
                    acc = 0.0
                    for m in range(m_lo, m_hi):
                        acc += rv[base + m] * fv[k, m]
                    ov[s, l, k] = acc
    return out
